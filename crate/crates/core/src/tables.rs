//! Embedded distribution tables for the unit-root and cointegration tests.
//!
//! Provenance:
//!
//! * ADF critical values: MacKinnon (2010), "Critical Values for
//!   Cointegration Tests", Queen's Economics Department Working Paper 1227,
//!   Table 2, rows for N = 1 (`cv = b_inf + b1/T + b2/T^2 + b3/T^3`).
//! * ADF p-values: MacKinnon (1994), "Approximate Asymptotic Distribution
//!   Functions for Unit-Root and Cointegration Tests", JBES 12(2), the
//!   N = 1 small-p and large-p normal-quantile polynomials.
//! * Johansen 5% critical values, unrestricted constant: MacKinnon, Haug and
//!   Michelis (1999), "Numerical Distribution Functions of Likelihood Ratio
//!   Tests for Cointegration", JAE 14(5), as printed by common econometrics
//!   packages.
//! * Johansen 10%/1% values for the no-deterministic, unrestricted-constant
//!   and unrestricted-trend cases, and all levels of the 5% table for those
//!   cases other than the one above: MacKinnon's `johdist` output as
//!   distributed with LeSage's Econometrics Toolbox (`c_sjt`, `c_sja`).
//! * Johansen restricted-constant and restricted-trend quantiles, and the
//!   mean/variance pairs used for gamma p-values in every case: simulated
//!   with `scripts/johansen_null_tables.py` (40,000 replications of the
//!   limiting Brownian functional discretised on 500 steps), rescaled to
//!   remove the discretisation bias and assembled by
//!   `scripts/emit_johansen_tables.py`.

/// MacKinnon (2010) response-surface coefficients, N = 1:
/// `[1%, 5%, 10%]` × `[b_inf, b1, b2, b3]`.
pub(crate) const ADF_CV_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
pub(crate) const ADF_CV_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
pub(crate) const ADF_CV_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// MacKinnon (1994) p-value surface for one deterministic case, N = 1.
pub(crate) struct AdfPValueSurface {
    /// Above this the p-value is 1.
    pub tau_max: f64,
    /// Below this the p-value is 0.
    pub tau_min: f64,
    /// Switch point between the small-p and large-p polynomials.
    pub tau_star: f64,
    /// Coefficients in ascending powers of tau.
    pub small_p: [f64; 3],
    pub large_p: [f64; 4],
    /// Asymptotic median of the statistic, where the surface gives 0.5.
    pub median: f64,
}

pub(crate) const ADF_P_NONE: AdfPValueSurface = AdfPValueSurface {
    tau_max: f64::INFINITY,
    tau_min: -19.04,
    tau_star: -1.04,
    small_p: [0.6344, 1.2378, 3.2496e-2],
    large_p: [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
    median: -0.4905602086253125,
};
pub(crate) const ADF_P_CONSTANT: AdfPValueSurface = AdfPValueSurface {
    tau_max: 2.74,
    tau_min: -18.83,
    tau_star: -1.61,
    small_p: [2.1659, 1.4412, 3.8269e-2],
    large_p: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
    median: -1.5672916686251266,
};
pub(crate) const ADF_P_TREND: AdfPValueSurface = AdfPValueSurface {
    tau_max: 0.7,
    tau_min: -16.18,
    tau_star: -2.89,
    small_p: [3.2512, 1.6047, 4.9588e-2],
    large_p: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
    median: -2.1819749613988395,
};

/// Largest `n - r` covered by the Johansen tables.
pub(crate) const JOHANSEN_MAX_DIM: usize = 12;

/// `[case][n - r - 1]` = `[10%, 5%, 1%]`.
pub(crate) const JOHANSEN_TRACE_CV: [[[f64; 3]; 12]; 5] = [
    [
        [2.9762, 4.1296, 6.9406],
        [10.4741, 12.3212, 16.364],
        [21.7781, 24.2761, 29.5147],
        [37.0339, 40.1749, 46.5716],
        [56.2839, 60.0627, 67.6367],
        [79.5329, 83.9383, 92.7136],
        [106.7351, 111.7797, 121.7375],
        [137.9954, 143.6691, 154.7977],
        [173.2292, 179.5199, 191.8122],
        [212.4721, 219.4051, 232.8291],
        [255.6732, 263.2603, 277.9962],
        [302.9054, 311.1288, 326.9716],
    ],
    [
        [7.5851, 9.1395, 12.6734],
        [17.9805, 20.2331, 24.9992],
        [32.1585, 35.2197, 40.9245],
        [50.6151, 54.1146, 61.5071],
        [72.8428, 77.2178, 85.9727],
        [99.1086, 103.825, 113.2523],
        [129.5888, 134.944, 145.6504],
        [163.5698, 169.98, 182.0885],
        [201.8396, 208.6412, 221.7134],
        [244.1824, 251.6981, 266.2026],
        [290.54, 298.487, 314.6587],
        [340.6614, 349.375, 366.0845],
    ],
    [
        [2.7055, 3.841465, 6.6349],
        [13.4294, 15.49471, 19.9349],
        [27.0669, 29.79707, 35.4628],
        [44.4929, 47.85613, 54.6815],
        [65.8202, 69.81889, 77.8202],
        [91.109, 95.75366, 104.9637],
        [120.3673, 125.6154, 135.9825],
        [153.6341, 159.5297, 171.0905],
        [190.8714, 197.3709, 210.0366],
        [232.103, 239.2354, 253.2526],
        [277.374, 285.1425, 300.2821],
        [326.5354, 334.9837, 351.215],
    ],
    [
        [10.6508, 12.4858, 16.4529],
        [23.2268, 25.7182, 31.0953],
        [39.4476, 42.7249, 49.0026],
        [59.9324, 63.798, 71.2182],
        [83.9795, 88.5223, 97.5086],
        [112.3871, 117.4557, 127.0762],
        [144.5907, 150.1071, 161.1945],
        [180.4898, 186.9714, 199.6121],
        [220.59, 227.5019, 241.1079],
        [264.9006, 272.6581, 287.1488],
        [313.1262, 321.1293, 337.3625],
        [364.8857, 373.8235, 391.3744],
    ],
    [
        [2.7055, 3.8415, 6.6349],
        [16.1619, 18.3985, 23.1485],
        [32.0645, 35.0116, 41.0815],
        [51.6492, 55.2459, 62.5202],
        [75.1027, 79.3422, 87.7748],
        [102.4674, 107.3429, 116.9829],
        [133.7852, 139.278, 150.0778],
        [169.0618, 175.1584, 187.1891],
        [208.3582, 215.1268, 228.2226],
        [251.6293, 259.0267, 273.3838],
        [298.8836, 306.8988, 322.4264],
        [350.1125, 358.719, 375.3203],
    ],
];
/// `[case][n - r - 1]` = `[10%, 5%, 1%]`.
pub(crate) const JOHANSEN_MAX_CV: [[[f64; 3]; 12]; 5] = [
    [
        [2.9762, 4.1296, 6.9406],
        [9.4748, 11.2246, 15.0923],
        [15.7175, 17.7961, 22.2519],
        [21.837, 24.1592, 29.0609],
        [27.916, 30.4428, 35.7359],
        [33.9271, 36.6301, 42.2333],
        [39.9085, 42.7679, 48.6606],
        [45.893, 48.8795, 55.0335],
        [51.8528, 54.9629, 61.3449],
        [57.7954, 61.0404, 67.6415],
        [63.7248, 67.0756, 73.8856],
        [69.6513, 73.0946, 80.0937],
    ],
    [
        [7.5851, 9.1395, 12.6734],
        [13.9156, 15.8875, 20.1405],
        [20.1132, 22.3697, 27.0248],
        [26.238, 28.7052, 33.8046],
        [32.2686, 34.8788, 40.3677],
        [38.2028, 41.0596, 46.8667],
        [44.2268, 47.0279, 53.1241],
        [50.0907, 53.1955, 59.5156],
        [56.1712, 59.4471, 65.6464],
        [62.005, 65.298, 72.0558],
        [67.9969, 71.3489, 78.4736],
        [73.8566, 77.331, 84.6712],
    ],
    [
        [2.7055, 3.841465, 6.6349],
        [12.2971, 14.2646, 18.52],
        [18.8928, 21.13162, 25.865],
        [25.1236, 27.58434, 32.7172],
        [31.2379, 33.87687, 39.3693],
        [37.2786, 40.07757, 45.8662],
        [43.2947, 46.23142, 52.3069],
        [49.2855, 52.36261, 58.6634],
        [55.2412, 58.43354, 64.996],
        [61.2041, 64.50472, 71.2525],
        [67.1307, 70.53513, 77.4877],
        [73.0563, 76.57843, 83.7105],
    ],
    [
        [10.6508, 12.4858, 16.4529],
        [17.1789, 19.3388, 23.8062],
        [23.3691, 25.8141, 30.8517],
        [29.4431, 32.0275, 37.5672],
        [35.5173, 38.1576, 43.9452],
        [41.4919, 44.5039, 50.5698],
        [47.318, 50.3434, 56.5833],
        [53.3777, 56.423, 62.9202],
        [59.4222, 62.6588, 69.0142],
        [65.291, 68.642, 75.6856],
        [71.2482, 74.6264, 81.7426],
        [76.9866, 80.4962, 87.7909],
    ],
    [
        [2.7055, 3.8415, 6.6349],
        [15.0006, 17.1481, 21.7465],
        [21.8731, 24.2522, 29.2631],
        [28.2398, 30.8151, 36.193],
        [34.4202, 37.1646, 42.8612],
        [40.5244, 43.4183, 49.4095],
        [46.5583, 49.5875, 55.8171],
        [52.5858, 55.7302, 62.1741],
        [58.5316, 61.8051, 68.503],
        [64.5292, 67.904, 74.7434],
        [70.463, 73.9355, 81.0678],
        [76.4081, 79.9878, 87.2395],
    ],
];
/// `[case][n - r - 1]` = `[mean, variance]` of the limiting distribution.
pub(crate) const JOHANSEN_TRACE_MOMENTS: [[[f64; 2]; 12]; 5] = [
    [
        [1.1447, 2.2165],
        [6.0987, 10.648],
        [15.0471, 25.2806],
        [28.0059, 45.9003],
        [45.056, 73.4929],
        [65.9227, 106.1604],
        [90.9871, 145.1854],
        [119.7456, 192.3108],
        [152.9315, 239.2439],
        [189.6406, 299.9897],
        [230.9335, 362.1653],
        [275.7756, 431.3769],
    ],
    [
        [4.0588, 6.892],
        [12.0729, 19.654],
        [23.9572, 38.188],
        [40.0986, 63.2275],
        [60.1084, 95.3105],
        [83.985, 132.003],
        [112.2307, 175.8594],
        [143.9922, 226.4925],
        [180.1258, 278.2498],
        [220.0908, 342.7774],
        [264.1784, 412.4036],
        [312.0329, 485.7105],
    ],
    [
        [0.9989, 1.9986],
        [8.3367, 14.6169],
        [19.4683, 32.5037],
        [34.6597, 55.1251],
        [53.7311, 84.6142],
        [76.6859, 120.2808],
        [103.9437, 160.7945],
        [134.6747, 210.7183],
        [169.862, 259.3932],
        [208.7629, 322.3453],
        [251.7633, 388.5744],
        [298.6139, 462.131],
    ],
    [
        [6.2958, 10.5273],
        [16.4675, 25.879],
        [30.3919, 46.9178],
        [48.5725, 73.8234],
        [70.5158, 105.8123],
        [96.448, 146.4327],
        [126.5349, 189.6555],
        [160.1481, 245.4058],
        [198.1936, 297.6151],
        [240.0206, 364.9225],
        [285.9099, 433.7812],
        [335.6464, 510.0711],
    ],
    [
        [1.0095, 2.0089],
        [10.4569, 18.158],
        [23.5978, 39.6244],
        [41.0724, 64.7816],
        [62.0805, 97.0908],
        [87.2406, 135.0831],
        [116.54, 177.7789],
        [149.263, 228.8498],
        [186.4034, 281.8509],
        [227.4351, 347.3382],
        [272.3609, 413.3418],
        [321.2359, 490.135],
    ],
];
/// `[case][n - r - 1]` = `[mean, variance]` of the limiting distribution.
pub(crate) const JOHANSEN_MAX_MOMENTS: [[[f64; 2]; 12]; 5] = [
    [
        [1.1447, 2.2165],
        [5.417, 9.095],
        [10.4666, 15.671],
        [15.6617, 21.5593],
        [21.0781, 26.9135],
        [26.3972, 32.2499],
        [31.8555, 36.6761],
        [37.4215, 41.2033],
        [42.863, 45.2696],
        [48.5079, 50.1513],
        [54.0826, 53.8641],
        [59.6707, 57.9553],
    ],
    [
        [4.0588, 6.892],
        [9.0134, 13.5431],
        [14.1621, 19.6885],
        [19.523, 25.2924],
        [24.958, 30.2922],
        [30.3563, 35.388],
        [35.8535, 39.9255],
        [41.3811, 44.0845],
        [46.9075, 48.6145],
        [52.458, 52.4057],
        [58.072, 57.2437],
        [63.5976, 60.9845],
    ],
    [
        [0.9989, 1.9986],
        [7.5604, 12.7202],
        [13.0358, 19.309],
        [18.5536, 24.478],
        [24.0714, 29.9755],
        [29.4606, 35.0211],
        [35.0419, 39.5058],
        [40.481, 44.2045],
        [46.0886, 48.0518],
        [51.6083, 52.82],
        [57.181, 56.9543],
        [62.7366, 60.6786],
    ],
    [
        [6.2958, 10.5273],
        [11.7043, 16.9016],
        [16.999, 22.8992],
        [22.4133, 28.0349],
        [27.9321, 32.5963],
        [33.3729, 38.0072],
        [38.8552, 41.9302],
        [44.3625, 46.5078],
        [49.9234, 50.703],
        [55.4871, 55.1554],
        [61.0409, 59.2139],
        [66.5889, 63.0004],
    ],
    [
        [1.0095, 2.0089],
        [9.6189, 16.2082],
        [15.4873, 22.6993],
        [21.2509, 27.5819],
        [26.8143, 32.8786],
        [32.4775, 37.985],
        [38.0054, 42.1684],
        [43.511, 46.5649],
        [49.1162, 50.9896],
        [54.705, 55.3075],
        [60.3289, 59.0929],
        [65.8023, 63.3962],
    ],
];
