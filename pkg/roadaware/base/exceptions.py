# -*- coding: utf-8 -*-
"""
Handled exceptions raised by the localization pipeline.

Every error carries the process exit code the command line reports for it.
"""

# Process exit codes of the command line.
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class RoadawareError(Exception):
    """
    Base class for pipeline exceptions.
    Subclasses should provide `.default_detail`, `.default_code` and
    `.exit_code` properties.
    """
    exit_code = EXIT_INTERNAL
    default_detail = "A localization error occurred."
    default_code = "error"

    def __init__(self, detail=None, code=None):
        if detail is None:
            detail = self.default_detail
        if code is None:
            code = self.default_code

        self.detail = str(detail)
        self.code = code
        super().__init__(self.detail)

    def __str__(self):
        return self.detail

    def with_context(self, context):
        """Returns a copy of the error whose detail is prefixed with context."""

        error = type(self).__new__(type(self))
        error.__dict__.update(self.__dict__)
        error.detail = "%s: %s" % (context, self.detail)
        error.args = (error.detail,)
        return error


class ConfigurationError(RoadawareError, ValueError):
    exit_code = EXIT_USAGE
    default_detail = "Invalid configuration."
    default_code = "invalid_config"


class DataError(RoadawareError):
    exit_code = EXIT_DATA
    default_detail = "Invalid input data."
    default_code = "invalid_data"


class ParseError(DataError):
    default_detail = "Malformed file."
    default_code = "parse_error"

    def __init__(self, detail=None, code=None, line=None):
        self.line = line
        if line is not None:
            detail = "line %d: %s" % (line, detail or self.default_detail)
        super().__init__(detail, code)


class ScenarioError(DataError, ValueError):
    default_detail = "Invalid scenario."
    default_code = "invalid_scenario"


class ProfileError(DataError):
    default_detail = "Invalid road profile database."
    default_code = "invalid_profile"


class DomainError(RoadawareError, ValueError):
    default_detail = "Math domain error."
    default_code = "domain_error"


class SegmentationError(RoadawareError, ValueError):
    default_detail = "Cannot segment the signal sequence."
    default_code = "segmentation_error"


class OracleGuardError(SegmentationError):
    default_detail = "Sequence too long for exhaustive search."
    default_code = "oracle_guard"


class FeatureError(RoadawareError, ValueError):
    default_detail = "Cannot extract features."
    default_code = "feature_error"


class CurveFitError(RoadawareError, ValueError):
    default_detail = "Cannot fit the coordinate curves."
    default_code = "curve_fit_error"


class RankDeficientFit(CurveFitError):
    default_detail = "Rank-deficient curve fit."
    default_code = "rank_deficient"

    def __init__(self, bs_index, detail=None, code=None):
        self.bs_index = bs_index
        if detail is None:
            detail = ("RSS of base station %d is constant across the segment"
                      % (bs_index + 1))
        super().__init__(detail, code)


class LocalizationError(RoadawareError, ValueError):
    default_detail = "Cannot locate the vehicle."
    default_code = "localization_error"


class CRLBError(RoadawareError, ValueError):
    default_detail = "Invalid bound computation."
    default_code = "crlb_error"
