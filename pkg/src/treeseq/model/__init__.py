from .config import ModelConfig  # noqa: F401
from .transformer import forward, init_params, loss_and_grads  # noqa: F401
from .optim import Adam  # noqa: F401
from .data import Example, encode_corpus, encode_sample, make_batch  # noqa: F401
from .training import train  # noqa: F401
from .beam import BeamSearch, Hypothesis, hyp_is_parsable  # noqa: F401
from .checkpoint import load_checkpoint, save_checkpoint  # noqa: F401
from .gradcheck import grad_check  # noqa: F401
