"""Computational gyrogroups: continuous ball models, finite tables, and
the dyadic prenorm construction, with verification suites over all of it."""

from .core import (
    GyrogroupModel,
    check_axioms,
    check_identities,
    derived_gyration,
    gyr_apply,
)
from .errors import (
    AxiomViolationError,
    CarrierDomainError,
    ChainConditionError,
    GyroError,
    ResourceLimitError,
    SamplingError,
    TableFormatError,
    UsageError,
)
from .models import (
    EinsteinModel,
    MobiusModel,
    ProductModel,
    check_strong_base,
    einstein_oplus,
    einstein_gyr,
    gamma,
    mobius_oplus,
    mobius_gyr,
)
from .prenorm import (
    DiscretePrenorm,
    DyadicFamily,
    FiniteChain,
    Prenorm,
    QuotientMetricSpace,
    RadialChain,
    build_dyadic,
    check_metric_properties,
    check_prenorm_properties,
    finite_chain,
    make_prenorm,
    parse_chain_spec,
    prenorm_eval,
    pseudometric_d,
    quotient_metric_rho,
    radial_chain,
    rapidity,
    validate_admissible_chain,
)
from .report import CheckResult, VerificationReport, canonical_json
from .sampling import Sampler, ToleranceConfig
from .tables import (
    CayleyTable,
    GyrationTable,
    SubgyrogroupSet,
    TableModel,
    builtin_table,
    coset_partition,
    cyclic_table,
    enumerate_subgyrogroups,
    gyr_table,
    gyr_tensor,
    is_L_subgyrogroup,
    klein_table,
    load_table,
    product_model,
    product_table,
    s3_table,
    search_gyrogroups,
    table_from_dict,
    validate_table,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomViolationError",
    "CarrierDomainError",
    "CayleyTable",
    "ChainConditionError",
    "CheckResult",
    "DiscretePrenorm",
    "DyadicFamily",
    "EinsteinModel",
    "FiniteChain",
    "GyrationTable",
    "GyroError",
    "GyrogroupModel",
    "MobiusModel",
    "Prenorm",
    "ProductModel",
    "QuotientMetricSpace",
    "RadialChain",
    "ResourceLimitError",
    "Sampler",
    "SamplingError",
    "SubgyrogroupSet",
    "TableFormatError",
    "TableModel",
    "ToleranceConfig",
    "UsageError",
    "VerificationReport",
    "build_dyadic",
    "builtin_table",
    "canonical_json",
    "check_axioms",
    "check_identities",
    "check_metric_properties",
    "check_prenorm_properties",
    "check_strong_base",
    "coset_partition",
    "cyclic_table",
    "derived_gyration",
    "einstein_gyr",
    "einstein_oplus",
    "enumerate_subgyrogroups",
    "finite_chain",
    "gamma",
    "gyr_apply",
    "gyr_table",
    "gyr_tensor",
    "is_L_subgyrogroup",
    "klein_table",
    "load_table",
    "make_prenorm",
    "mobius_gyr",
    "mobius_oplus",
    "parse_chain_spec",
    "prenorm_eval",
    "product_model",
    "product_table",
    "pseudometric_d",
    "quotient_metric_rho",
    "radial_chain",
    "rapidity",
    "s3_table",
    "search_gyrogroups",
    "table_from_dict",
    "validate_admissible_chain",
    "validate_table",
    "__version__",
]
