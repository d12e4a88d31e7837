class GolayNomaError(Exception):
    """
    Root of every error raised by the `golay_noma` package.
    Messages follow the `[TAG] description` convention used across the code base.
    """

    ...


class DimensionMismatchError(GolayNomaError): ...
