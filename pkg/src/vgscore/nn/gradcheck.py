"""Central-finite-difference verification of reverse-mode gradients.

Callers supply a deterministic scalar loss closure (eval mode, fixed
batch) and the parameter list.  Parameters should be 64-bit for the
stated tolerances to be meaningful.
"""

from dataclasses import dataclass

import numpy as np

FD_STEP = 1e-5
SAMPLE_THRESHOLD = 5000


@dataclass(frozen=True)
class ParamCheck:
    name: str
    checked: int
    max_rel_err: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tolerance


@dataclass(frozen=True)
class GradCheckReport:
    entries: tuple
    tolerance: float

    @property
    def max_rel_err(self) -> float:
        return max((e.max_rel_err for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> tuple:
        return tuple(e for e in self.entries if not e.passed)

    def to_text(self) -> str:
        lines = [f"gradient check  tolerance={self.tolerance:g}  step={FD_STEP:g}"]
        width = max((len(e.name) for e in self.entries), default=4)
        for e in self.entries:
            flag = "ok  " if e.passed else "FAIL"
            lines.append(f"  {flag}  {e.name:<{width}}  checked={e.checked:<6d}"
                         f"  max_rel_err={e.max_rel_err:.3e}")
        verdict = "PASSED" if self.passed else "FAILED"
        lines.append(f"overall: {verdict}  max_rel_err={self.max_rel_err:.3e}")
        return "\n".join(lines)


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def grad_check(loss_fn, params: list, tolerance: float = 1e-4, step: float = FD_STEP,
               sample_threshold: int = SAMPLE_THRESHOLD, sample_size: int = 500,
               rng: np.random.Generator | None = None) -> GradCheckReport:
    """Compares loss_fn's reverse-mode gradients with central differences.

    params: [(name, Tensor)].  Parameters larger than sample_threshold
    elements are spot-checked at sample_size positions drawn from rng
    (deterministic default).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    for _, p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = {}
    for name, p in params:
        analytic[name] = np.zeros_like(p.data) if p.grad is None else p.grad.copy()

    entries = []
    for name, p in params:
        flat = p.data.reshape(-1)
        size = flat.size
        if size > sample_threshold:
            positions = np.sort(rng.choice(size, size=sample_size, replace=False))
        else:
            positions = np.arange(size)
        worst = 0.0
        a_flat = analytic[name].reshape(-1)
        for i in positions:
            original = flat[i]
            flat[i] = original + step
            loss_hi = float(loss_fn().data)
            flat[i] = original - step
            loss_lo = float(loss_fn().data)
            flat[i] = original
            fd = (loss_hi - loss_lo) / (2.0 * step)
            worst = max(worst, _rel_err(fd, float(a_flat[i])))
        entries.append(ParamCheck(name=name, checked=int(len(positions)),
                                  max_rel_err=worst, tolerance=tolerance))
    return GradCheckReport(entries=tuple(entries), tolerance=tolerance)
