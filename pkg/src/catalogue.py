"""
本征形式目录：每个水平同时给出 eta 乘积和一条整系数 Weierstrass 曲线

坏素数处的 a_p 取自 eta 展开。两个后端的一致性由测试保证。
"""

CATALOGUE_DATA = {
    "11": {
        'label': '11a',
        'eta': ((1, 2), (11, 2)),
        'curve': (0, -1, 1, -10, -20),
        'bad_ap': {11: 1},
        'cm': False,
    },
    "14": {
        'label': '14a',
        'eta': ((1, 1), (2, 1), (7, 1), (14, 1)),
        'curve': (1, 0, 1, 4, -6),
        'bad_ap': {2: -1, 7: 1},
        'cm': False,
    },
    "15": {
        'label': '15a',
        'eta': ((1, 1), (3, 1), (5, 1), (15, 1)),
        'curve': (1, 1, 1, -10, -10),
        'bad_ap': {3: -1, 5: 1},
        'cm': False,
    },
    "20": {
        'label': '20a',
        'eta': ((2, 2), (10, 2)),
        'curve': (0, 1, 0, 4, 4),
        'bad_ap': {2: 0, 5: -1},
        'cm': False,
    },
    "24": {
        'label': '24a',
        'eta': ((2, 1), (4, 1), (6, 1), (12, 1)),
        'curve': (0, -1, 0, -4, 4),
        'bad_ap': {2: 0, 3: -1},
        'cm': False,
    },
    # CM by Q(sqrt(-3))
    "27": {
        'label': '27a',
        'eta': ((3, 2), (9, 2)),
        'curve': (0, 0, 1, 0, -7),
        'bad_ap': {3: 0},
        'cm': True,
    },
    # CM by Q(i)
    "32": {
        'label': '32a',
        'eta': ((4, 2), (8, 2)),
        'curve': (0, 0, 0, -1, 0),
        'bad_ap': {2: 0},
        'cm': True,
    },
    # CM by Q(sqrt(-3))
    "36": {
        'label': '36a',
        'eta': ((6, 4),),
        'curve': (0, 0, 0, 0, 1),
        'bad_ap': {2: 0, 3: 0},
        'cm': True,
    },
}
