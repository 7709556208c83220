"""
Collection of named constants and run-wide defaults.

The named matrix entries are exact quadratic irrationals in the
``(a, b, c, d)`` form understood by :mod:`recipsum.numerics`, so

>>> NAMED_ENTRIES['golden']
(1, 1, 2, 5)

stands for (1 + sqrt(5))/2. Numeric defaults can be overridden per call;
the working precision can also be set from the environment:

>>> working_precision({})
192
>>> working_precision({'RECIPSUM_PRECISION': '256'})
256
>>> working_precision({'RECIPSUM_PRECISION': '64'})
Traceback (most recent call last):
    ...
recipsum.errors.ConfigError: RECIPSUM_PRECISION must be at least 128 bits, got 64
"""

import os as _os

from .errors import ConfigError as _ConfigError

# named entries as (a, b, c, d) = (a + b*sqrt(d))/c
golden = golden_ratio = (1, 1, 2, 5)
silver = silver_ratio = (1, 1, 1, 2)
NAMED_ENTRIES = {
    'golden': golden,
    'phi': golden,
    'silver': silver,
}

# precision in bits
DEFAULT_PRECISION = 192
MIN_PRECISION = 128
PRECISION_ENV = 'RECIPSUM_PRECISION'

# |v_h| < 2**-ZERO_BITS counts as zero on decimal coordinates
ZERO_BITS = 100

# relative margin of the float fast path, as a power of two
FLOAT_MARGIN_BITS = 30

# elementary enumeration steps
DEFAULT_BUDGET = 10 ** 9
DEFAULT_MAX_NODES = 10 ** 7

# boxes up to this many points are summed in exact arithmetic
EXACT_TERMS = 2048

# lattice dimension cap
MAX_DIM = 8

# LLL parameter used for the enumeration radius
LLL_DELTA = 0.75

# version of the CSV columns written by the command line
SCHEMA_VERSION = 1


def working_precision(environ=None):
    """Working precision in bits, honouring ``RECIPSUM_PRECISION``."""
    if environ is None:
        environ = _os.environ
    raw = environ.get(PRECISION_ENV)
    if raw is None or raw == '':
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        raise _ConfigError("%s must be an integer, got %r" % (PRECISION_ENV, raw))
    if bits < MIN_PRECISION:
        raise _ConfigError("%s must be at least %d bits, got %d"
                           % (PRECISION_ENV, MIN_PRECISION, bits))
    return bits
