from ._d2gen import *  # noqa: F401,F403
