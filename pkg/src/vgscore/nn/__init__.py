"""Dense-tensor reverse-mode autodiff engine and the layer set the models need."""
