"""freeconv: free probability convolutions and infinite divisibility checks."""

__version__ = "0.1.0"

from .catalog import (  # noqa: F401
    LAWS,
    MeasureSpec,
    boolean_cumulants_of,
    catalog_density,
    catalog_moments,
    free_cumulants_of,
    moments_of,
    push_square,
    reflect,
)
from .conv import (  # noqa: F401
    boolean_add,
    boolean_power,
    check_1418,
    commutator,
    free_add,
    free_add_density,
    free_mult,
    free_power,
    free_power_fid,
    support_edge,
)
from .idclass import (  # noqa: F401
    ClassicalTriplet,
    FreeTriplet,
    LevyMeasure,
    RegularForm,
    RModel,
    from_regular_form,
    kurtosis_check,
    main3_factor,
    positivity_scan,
    to_regular_form,
)
from .ncpart import SeqN, SetPartition, catalan  # noqa: F401
from .transforms import cauchy, s_series, stieltjes_invert  # noqa: F401
from .verify import run_verify  # noqa: F401
