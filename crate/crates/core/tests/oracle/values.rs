// Reference values evaluated with mpmath at 50 significant digits, rounded
// to the nearest f64. Inputs were drawn once with a fixed seed.

#![allow(clippy::approx_constant)]

pub const PATH_LOSS_TO_DISTANCE: &[(f64, f64, f64, f64, f64)] = &[
    (80.0, 2.0, 0.0508, 1.0, 40.42535554534141),
    (75.907, 2.0, 0.125, 10.0, 62.094073154954934),
    (53.863, 3.5, 0.0508, 2.0, 1.9967759628513322),
    (96.623, 3.5, 0.0508, 1.0, 24.718992766964263),
    (56.876, 2.7, 0.0508, 1.0, 2.1561030664123537),
    (57.257, 2.7, 0.0508, 10.0, 4.04613051513312),
    (59.904, 2.0, 0.3, 10.0, 23.610837417709746),
    (96.64, 2.0, 0.3, 10.0, 1621.479232454949),
    (81.734, 2.0, 0.0508, 10.0, 49.35757888102447),
    (118.677, 2.7, 0.125, 1.0, 817.0701968429472),
    (93.255, 3.5, 0.125, 10.0, 88.88503680087412),
    (115.29, 2.0, 0.0508, 10.0, 2350.4653227017193),
    (95.696, 2.0, 0.125, 1.0, 606.0384084302343),
];
pub const DISTANCE_TO_PATH_LOSS: &[(f64, f64, f64, f64, f64)] = &[
    (40.42535554534142, 2.0, 0.0508, 1.0, 80.0),
    (493.422, 2.0, 0.3, 1.0, 86.30614237187932),
    (557.49, 2.7, 0.3, 10.0, 99.59017338964779),
    (385.405, 2.7, 0.125, 10.0, 102.86576532494274),
    (831.174, 2.7, 0.125, 1.0, 118.87767965871986),
    (715.147, 3.5, 0.0508, 1.0, 147.77075927464915),
    (517.407, 3.5, 0.125, 2.0, 130.5146775850026),
    (656.771, 2.7, 0.3, 1.0, 108.51194932418333),
    (107.141, 2.7, 0.0508, 2.0, 100.5685168447276),
    (137.634, 2.7, 0.125, 1.0, 97.79159177834826),
    (865.855, 2.0, 0.3, 10.0, 91.19067556975754),
    (710.396, 2.7, 0.125, 10.0, 110.03651072040068),
    (315.81, 2.7, 0.3, 2.0, 97.81906091307854),
];
pub const SPEED: &[([f64; 7], f64)] = &[
    (
        [275.05, 374.38, 273.67, 375.562, 6.5, 7.989, 0.015549],
        1.2076772715510102,
    ),
    (
        [2311.78, 2724.95, 2311.454, 2726.25, 88.704, 89.463, 0.047038],
        1.6627655458801764,
    ),
    (
        [1421.86, 2443.68, 1421.822, 2441.989, 28.743, 30.246, 0.019955],
        1.1106217271045205,
    ),
    (
        [3667.26, 1986.03, 3665.2580000000003, 1985.44, 27.784, 28.144, 0.021583],
        5.469657113857938,
    ),
    (
        [
            2200.88,
            2825.59,
            2203.799,
            2826.686,
            38.044,
            38.581999999999994,
            0.004241,
        ],
        5.750167226579529,
    ),
    (
        [
            605.19,
            2634.07,
            602.2620000000001,
            2636.0570000000002,
            18.234,
            18.87,
            0.007369,
        ],
        5.500035574654309,
    ),
    (
        [2138.36, 2439.25, 2137.272, 2437.003, 85.92, 87.825, 0.032783],
        1.2883528326127434,
    ),
    (
        [2959.14, 1826.57, 2961.366, 1829.281, 68.058, 69.221, 0.019964],
        2.965255832187341,
    ),
    (
        [1576.48, 1926.09, 1575.883, 1924.234, 98.467, 99.404, 0.005585],
        2.0684103111606094,
    ),
    (
        [2402.91, 409.52, 2403.3109999999997, 409.74, 94.895, 96.161, 0.003609],
        0.360256550019265,
    ),
];
pub const HEADING: &[([f64; 4], f64)] = &[
    ([1.0, 0.0, 0.0, 1.0], 1.5707963267948966),
    ([1.0, 0.0, -1.0, 0.0], 3.141592653589793),
    ([3.0, 4.0, 4.0, 3.0], 0.28379410920832787),
    ([-2.92, -1.238, 1.344, 4.555], 2.2587153262419855),
    ([1.023, -0.258, -3.846, -0.119], 2.8636136585501233),
    ([4.778, -0.196, -1.881, -3.559], 2.015999811148673),
    ([2.497, 2.404, -0.214, 1.921], 0.9153144920318231),
    ([0.163, -2.948, 4.52, -1.382], 1.2188351827868935),
    ([1.901, 4.141, 2.581, -2.019], 1.8042539448157915),
    ([1.429, -4.09, 3.454, 0.184], 1.2878874142704637),
    ([4.083, -1.443, -2.772, 0.416], 2.9508378454476993),
];
pub const QUEUING: &[(f64, u32, f64, f64)] = &[
    (4096.0, 10, 2000000.0, 0.02048),
    (8192.0, 40, 2000000.0, 0.16384),
    (4096.0, 51, 2000000.0, 0.104448),
    (12000.0, 47, 2000000.0, 0.282),
    (4096.0, 33, 11000000.0, 0.012288),
    (8192.0, 46, 1000000.0, 0.376832),
    (512.0, 50, 5500000.0, 0.004654545454545455),
    (12000.0, 16, 2000000.0, 0.096),
    (8192.0, 28, 5500000.0, 0.041704727272727275),
    (8192.0, 5, 2000000.0, 0.02048),
    (512.0, 14, 11000000.0, 0.0006516363636363637),
];
pub const BACKOFF: &[(f64, u32, f64, f64)] = &[
    (0.5, 2, 0.001, 0.004),
    (0.5, 64, 0.001, 0.002),
    (0.1949, 28, 0.002, 0.002491314575029817),
    (0.5966, 80, 0.001, 0.002478929102627665),
    (0.4607, 46, 0.0005, 0.0009271277582058741),
    (0.0897, 17, 0.002, 0.0028251215189974634),
    (0.7454, 27, 0.002, 0.007855459544383348),
    (0.8457, 57, 0.0005, 0.0032404406999351912),
    (0.3226, 52, 0.002, 0.002952465315503537),
    (0.3873, 12, 0.0005, 0.0008198049360422294),
    (0.1593, 18, 0.001, 0.0012551913644518304),
    (0.1521, 61, 0.0005, 0.0005897217829701106),
];
pub const TRANSMIT_WEIGHT: &[([f64; 4], f64)] = &[
    ([500.0, 100.0, 0.05, 2.0], 50.0),
    ([250.0, 366.9444, 0.59627, 14.236], 0.08026178345985654),
    ([500.0, 93.5483, 0.54874, 0.652], 14.938943679425092),
    ([1000.0, 389.8052, 0.52705, 28.009], 0.17378126348523606),
    ([500.0, 591.9297, 0.19561, 26.218], 0.16470593961012392),
    ([250.0, 151.1016, 0.29367, 7.224], 0.7798904908912289),
    ([1000.0, 195.5943, 0.54481, 25.028], 0.3749493359508173),
    ([250.0, 546.0103, 0.35443, 13.75], 0.09395199369252637),
    ([1000.0, 489.0284, 0.51724, 24.816], 0.15930963231322076),
    ([1000.0, 78.4588, 0.15268, 15.321], 5.448652048354364),
    ([500.0, 465.9039, 0.60895, 23.283], 0.07569254113075417),
];
pub const RELIABILITY: &[(i64, f64)] = &[
    (0, 1.0),
    (1, 2.718281828459045),
    (2, 7.38905609893065),
    (5, 148.4131591025766),
    (10, 22026.465794806718),
    (20, 485165195.4097903),
];
pub const NHDF_LN: &[(f64, f64, u32, u32, f64)] = &[
    (50.0, 0.05448, 2, 0, 13.643889245138052),
    (50.0, 0.05448, 3, 0, 20.46583386770708),
    (7490.549, 0.07164, 80, 5, 919.599925867604),
    (6017.27, 0.03182, 88, 4, 1065.2043298768763),
    (26536.552, 0.24176, 100, 0, 1160.6088162797694),
    (44161.449, 0.02935, 25, 2, 353.60175564051724),
    (2110.424, 0.04977, 58, 4, 613.9892483351824),
    (1393.774, 0.44711, 9, 3, 69.40248975980201),
    (16281.019, 0.48671, 78, 4, 808.5916795529947),
    (9970.561, 0.13932, 66, 4, 733.7726816017982),
    (40368.203, 0.25437, 32, 5, 378.19241851526215),
    (26160.721, 0.43811, 34, 4, 369.90818724787),
];
