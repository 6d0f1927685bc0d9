from . import (
    context,
    datatypes,
    errors,
    exact,
    hurwitz,
    multigamma,
    numbers,
    reduction,
    special_values,
)
