"""Pydantic field types for complex numbers.

Input accepts plain numbers, ``[re, im]`` pairs and strings such as ``"1-2j"``
or ``"1-2i"``; output is always an ``[re, im]`` pair.
"""
import math
from typing import Annotated, List

from pydantic import PlainSerializer, PlainValidator


def parse_complex(value) -> complex:
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(value, (int, float, complex)):
        result = complex(value)
    elif isinstance(value, str):
        try:
            result = complex(value.replace(" ", "").replace("i", "j"))
        except ValueError as e:
            raise ValueError(f"cannot read {value!r} as a complex number") from e
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, bool) or isinstance(im, bool):
            raise ValueError("booleans are not numbers here")
        result = complex(float(re), float(im))
    else:
        raise ValueError(f"expected a number, a [re, im] pair or a string, got {value!r}")

    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise ValueError(f"complex value must be finite, got {value!r}")
    return result


def dump_complex(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


ComplexValue = Annotated[complex, PlainValidator(parse_complex), PlainSerializer(dump_complex)]
