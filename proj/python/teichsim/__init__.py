from ._teichsim import *  # noqa: F401,F403
from ._teichsim import __doc__  # noqa: F401
