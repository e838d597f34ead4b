"""Exception types raised across the package."""


class KwrankError(Exception):
    """Base class for every domain error raised by kwrank."""


class InvalidEncoding(KwrankError):
    pass


class FetchError(KwrankError):
    pass


class NotFound(KwrankError):
    pass


class EmptyTable(KwrankError):
    pass


class EmptyInput(KwrankError):
    pass


class FormatError(KwrankError):
    pass


class KBError(KwrankError):
    """A knowledge base that cannot be used for ranking."""


class VocabularyError(KBError):
    pass


class UnknownKeyword(KwrankError):
    def __init__(self, keywords):
        self.keywords = sorted(keywords)
        super().__init__("unknown keyword(s): " + ", ".join(self.keywords))


class CyclicKnowledgeBase(KBError):
    def __init__(self, report):
        self.report = report
        super().__init__("cycle in knowledge base: " + " -> ".join(report.cycle))


class ConfigError(KwrankError):
    pass
