# ladris/exceptions.py


class LadrisError(Exception):
    """Base exception for every error raised by the package."""
    pass


class InvalidInputError(LadrisError, ValueError):
    """Raised when an operation receives input it cannot work with."""
    pass


class ShapeError(LadrisError, ValueError):
    """Raised when array shapes or spatial sizes are incompatible."""
    pass


class InvalidConfigError(LadrisError, ValueError):
    """Raised when a configuration is inconsistent or cannot be satisfied."""
    pass


class GenerationError(LadrisError):
    """Base exception for synthetic data generation failures."""
    pass


class SceneGenerationError(GenerationError):
    """Raised when instances cannot be placed within the retry budget."""
    pass


class ExpressionGenerationError(GenerationError):
    """Raised when no template yields a uniquely resolving expression."""
    def __init__(self, message: str, target_index: int):
        self.target_index = target_index
        super().__init__(f"Target {target_index}: {message}")


class CheckpointFormatError(LadrisError):
    """Raised when a checkpoint cannot be restored into the current model."""
    pass


class TrainingDivergedError(LadrisError):
    """Raised when the training loss stops being finite."""
    def __init__(self, epoch: int, step: int, loss: float):
        self.epoch = epoch
        self.step = step
        self.loss = loss
        super().__init__(f"Non-finite loss {loss} at epoch {epoch}, step {step}")


class ClientError(LadrisError):
    """Base exception for annotation client failures."""
    pass


class ClientTimeoutError(ClientError):
    """Raised when a remote client does not answer within its timeout."""
    pass


class ClientTransportError(ClientError):
    """Raised when a remote client cannot be reached or answers with a transport failure."""
    pass


class MalformedResponseError(ClientError):
    """Raised when a client answers with content that violates the interface contract."""
    pass
