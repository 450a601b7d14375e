export class ExtractorError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Video file missing, malformed, or in an unsupported codec. */
export class DecodeError extends ExtractorError {}

/** Backbone weights not cached, or cached bytes fail the pinned hash. */
export class BackboneUnavailable extends ExtractorError {}

/** Bad command line or job manifest. */
export class UsageError extends ExtractorError {}
