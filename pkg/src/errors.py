"""
异常层次，每个类携带命令行退出码
"""


class GMFError(Exception):
    """所有库异常的基类"""
    exit_code = 1


class UsageError(GMFError):
    """参数不合法，或分析被拒绝执行"""
    exit_code = 2


class CMFormError(UsageError):
    """需要无 CM 形式的分析收到了 CM 形式"""


class NotCMError(UsageError):
    """需要 CM 形式的分析收到了无 CM 形式"""


class DegeneratePairError(UsageError):
    """成对统计的两个形式相同"""


class CatalogueError(GMFError):
    exit_code = 3


class IntegrityError(GMFError):
    """计算结果违反了应当恒成立的关系（后端不一致、Deligne 界、规范化等）"""
    exit_code = 4


class DataIOError(GMFError):
    exit_code = 5


class ArithmeticDomainError(GMFError, ValueError):
    exit_code = 6


class EmptyRangeError(ArithmeticDomainError):
    pass


class ShapeError(ArithmeticDomainError):
    pass


class NonUnitError(ArithmeticDomainError):
    pass


class UnsupportedQuotientError(ArithmeticDomainError):
    pass


class MissingDataError(ArithmeticDomainError):
    pass
