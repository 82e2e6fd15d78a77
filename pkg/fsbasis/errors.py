class FsBasisError(Exception):
    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class RankOutOfRange(FsBasisError):
    pass


class InvalidInput(FsBasisError):
    pass


class UnsupportedWeight(FsBasisError):
    def __init__(self, message: str):
        if not message.startswith("unsupported: "):
            message = f"unsupported: {message}"
        super().__init__(message)


class InternalError(FsBasisError):
    pass
