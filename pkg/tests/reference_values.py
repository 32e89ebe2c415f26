"""Published benchmark values for example1 and example2 (four decimals).

``ERRORS[variant][eps_exp]`` lists global errors for N = 8, 16, ..., 1024;
``ORDERS[(problem, variant)][eps_exp]`` lists double-mesh orders for
N = 8, ..., 512, with the ``"uniform"`` key holding the eps-uniform row.
"""

ERROR_N = [8, 16, 32, 64, 128, 256, 512, 1024]
ORDER_N = [8, 16, 32, 64, 128, 256, 512]

ERRORS = {
    "lstar": {
        0: [0.0666, 0.0170, 0.0043, 0.0011, 0.0003, 0.0001, 0.0000, 0.0000],
        4: [0.3201, 0.1305, 0.0408, 0.0098, 0.0022, 0.0005, 0.0001, 0.0000],
        8: [0.4463, 0.3148, 0.1831, 0.0957, 0.0444, 0.0171, 0.0052, 0.0014],
        12: [0.4601, 0.3296, 0.1982, 0.1103, 0.0581, 0.0295, 0.0145, 0.0069],
        16: [0.4610, 0.3305, 0.1992, 0.1112, 0.0590, 0.0303, 0.0153, 0.0077],
        20: [0.4610, 0.3306, 0.1993, 0.1113, 0.0591, 0.0304, 0.0154, 0.0077],
    },
    "l": {
        0: [0.0754, 0.0196, 0.0049, 0.0012, 0.0003, 0.0001, 0.0000, 0.0000],
        4: [0.9269, 0.3724, 0.1075, 0.0260, 0.0059, 0.0013, 0.0003, 0.0001],
        8: [1.1373, 0.7007, 0.3563, 0.1703, 0.0771, 0.0303, 0.0096, 0.0026],
        12: [1.1545, 0.7246, 0.3769, 0.1911, 0.0980, 0.0493, 0.0243, 0.0116],
        16: [1.1556, 0.7261, 0.3782, 0.1926, 0.0993, 0.0506, 0.0255, 0.0128],
        20: [1.1557, 0.7262, 0.3783, 0.1927, 0.0994, 0.0506, 0.0256, 0.0128],
    },
    "hat": {
        0: [0.0710, 0.0181, 0.0046, 0.0011, 0.0003, 0.0001, 0.0000, 0.0000],
        4: [0.5840, 0.2380, 0.0703, 0.0173, 0.0039, 0.0009, 0.0002, 0.0000],
        8: [0.7150, 0.4598, 0.2575, 0.1302, 0.0595, 0.0231, 0.0072, 0.0019],
        12: [0.7200, 0.4798, 0.2768, 0.1479, 0.0759, 0.0381, 0.0187, 0.0089],
        16: [0.7202, 0.4811, 0.2781, 0.1490, 0.0770, 0.0391, 0.0196, 0.0098],
        20: [0.7203, 0.4812, 0.2781, 0.1491, 0.0770, 0.0391, 0.0197, 0.0099],
    },
    "upwind": {
        0: [0.1245, 0.0703, 0.0372, 0.0191, 0.0097, 0.0049, 0.0024, 0.0012],
        4: [0.6516, 0.3804, 0.2069, 0.1116, 0.0598, 0.0319, 0.0170, 0.0090],
        8: [0.7913, 0.4592, 0.2569, 0.1417, 0.0780, 0.0422, 0.0226, 0.0120],
        12: [0.7994, 0.4653, 0.2602, 0.1434, 0.0790, 0.0428, 0.0229, 0.0122],
        16: [0.7999, 0.4656, 0.2604, 0.1436, 0.0790, 0.0428, 0.0229, 0.0122],
        20: [0.7999, 0.4657, 0.2604, 0.1436, 0.0790, 0.0428, 0.0229, 0.0122],
    },
}

ORDERS = {
    ("example1", "lstar"): {
        0: [1.9025, 1.9762, 1.9943, 1.9987, 1.9997, 2.0000, 2.0000],
        4: [1.2654, 1.6719, 1.9879, 1.7876, 1.6014, 1.6438, 1.6834],
        8: [0.8021, 0.5796, 0.8045, 0.9202, 1.2133, 1.6216, 1.8799],
        12: [0.7724, 0.5813, 0.7981, 0.8801, 0.9403, 0.9742, 0.9906],
        16: [0.7704, 0.5813, 0.7975, 0.8797, 0.9398, 0.9740, 0.9899],
        20: [0.7703, 0.5813, 0.7975, 0.8797, 0.9398, 0.9740, 0.9898],
        "uniform": [0.9004, 0.5813, 0.7975, 0.8797, 0.9398, 0.9740, 0.9898],
    },
    ("example1", "upwind"): {
        0: [1.1033, 1.0507, 1.0286, 1.0148, 1.0075, 1.0037, 1.0019],
        4: [0.7810, 0.9087, 0.9019, 0.9085, 0.9134, 0.9193, 0.9189],
        8: [0.8370, 0.8311, 0.8458, 0.8674, 0.8775, 0.8956, 0.9074],
        12: [0.8355, 0.8268, 0.8418, 0.8713, 0.8752, 0.8946, 0.9064],
        16: [0.8354, 0.8263, 0.8419, 0.8715, 0.8751, 0.8945, 0.9063],
        20: [0.8354, 0.8262, 0.8419, 0.8715, 0.8751, 0.8945, 0.9063],
        "uniform": [0.8354, 0.8262, 0.8419, 0.8715, 0.8751, 0.8945, 0.9063],
    },
    ("example2", "lstar"): {
        0: [1.9297, 1.9604, 1.9844, 1.9930, 1.9967, 1.9984, 1.9992],
        4: [0.5233, 0.8485, 1.1258, 1.3165, 1.4590, 1.5645, 1.6393],
        8: [0.3879, 0.6967, 1.0264, 1.2831, 1.4689, 1.3243, 1.6966],
        12: [0.3807, 0.6921, 1.0227, 1.2796, 1.3505, 0.9298, 0.9505],
        16: [0.3802, 0.6917, 1.0224, 1.2794, 1.3496, 0.9295, 0.9502],
        20: [0.3801, 0.6917, 1.0224, 1.2794, 1.3496, 0.9295, 0.9501],
        "uniform": [0.4410, 0.6917, 1.0224, 1.2794, 1.3496, 0.9295, 0.9501],
    },
    ("example2", "upwind"): {
        0: [0.8903, 0.9471, 0.9710, 0.9847, 0.9919, 0.9959, 0.9979],
        4: [0.3737, 0.5625, 0.6500, 0.6954, 0.7152, 0.8034, 0.8202],
        8: [0.3337, 0.5258, 0.5879, 0.6735, 0.7304, 0.8087, 0.8301],
        12: [0.3299, 0.5229, 0.5821, 0.6726, 0.7317, 0.8097, 0.8303],
        16: [0.3298, 0.5227, 0.5817, 0.6726, 0.7318, 0.8098, 0.8303],
        20: [0.3298, 0.5227, 0.5817, 0.6726, 0.7318, 0.8098, 0.8303],
        "uniform": [0.3298, 0.5227, 0.5817, 0.6726, 0.7318, 0.8098, 0.8303],
    },
}


def error_value(variant, eps_exp, n):
    return ERRORS[variant][eps_exp][ERROR_N.index(n)]


def order_value(problem, variant, eps_exp, n):
    return ORDERS[(problem, variant)][eps_exp][ORDER_N.index(n)]
