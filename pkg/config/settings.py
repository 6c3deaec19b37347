"""
GMF q-指数实验配置文件
"""
import os
from dotenv import load_dotenv
load_dotenv()

# 目录中的全部水平（前五个无 CM，后三个为 CM 形式）
CATALOGUE_LEVELS = [
    "11",
    "14",
    "15",
    "20",
    "24",
    "27",
    "32",
    "36",
]

# 幂级数 / 指数截断配置
SERIES_CONFIG = {
    'limit': int(os.getenv("GMF_LIMIT", "10000")),   # 指数截断 M
    'crosscheck_limit': 1000,                        # 两个后端交叉校验的范围
    'product_limit': 200,                            # 乘积展开默认阶数（精确有理运算，开销 O(M^2)）
}

# 本征形式后端配置
EIGENFORM_CONFIG = {
    'backend': os.getenv("GMF_BACKEND", "curve"),    # 'curve'（点计数）或 'eta'（eta 商展开）
    'workers': int(os.getenv("GMF_WORKERS", "1")),   # 点计数进程数，1 表示不开进程池
    'chunk_size': 512,                               # 每个任务处理的素数个数
}

# 统计分析配置
ANALYSIS_CONFIG = {
    'xmax': int(os.getenv("GMF_XMAX", "100000")),
    'bins': 20,
    'tol_single': 0.02,        # 单形式符号密度
    'tol_pair': 0.03,          # 成对乘积符号密度
    'tol_joint': 0.05,         # 联合象限质量
    'tol_discrepancy': 0.05,   # Sato-Tate 直方图最大偏差
    'tol_cm': 0.02,            # CM 形式 b(p)=0 的比例
    'zero_ratio_max': 0.01,    # 单形式 c(p)=0 的比例上限
    'kappa_threshold': 6 / 25,
    'checkpoints': [10 ** k for k in range(2, 8)],
}

# 输出配置
OUTPUT_DIR = os.getenv("GMF_OUTPUT_DIR", "data")
CACHE_DIR = os.getenv("GMF_CACHE_DIR", os.path.join(OUTPUT_DIR, "cache"))

LOG_CONFIG = {
    'level': os.getenv("GMF_LOG_LEVEL", "INFO"),
    'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s',
}
