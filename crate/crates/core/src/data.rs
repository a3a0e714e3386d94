//! Bundled reference tables.

/// CIE 1924 photopic luminous efficiency V(λ), 380–780 nm in 5 nm steps.
pub const PHOTOPIC_START_NM: f64 = 380.0;
pub const PHOTOPIC_STEP_NM: f64 = 5.0;
pub const PHOTOPIC_V: [f64; 81] = [
    3.9e-05, 6.4e-05, 0.00012, 0.000217, 0.000396, 0.00064, 0.00121, 0.00218, 0.004, 0.0073, 0.0116, 0.01684, 0.023,
    0.0298, 0.038, 0.048, 0.06, 0.0739, 0.09098, 0.1126, 0.13902, 0.1693, 0.20802, 0.2586, 0.323, 0.4073, 0.503,
    0.6082, 0.71, 0.7932, 0.862, 0.9148501, 0.954, 0.9803, 0.9949501, 1.0, 0.995, 0.9786, 0.952, 0.9154, 0.87, 0.8163,
    0.757, 0.6949, 0.631, 0.5668, 0.503, 0.4412, 0.381, 0.321, 0.265, 0.217, 0.175, 0.1382, 0.107, 0.0816, 0.061,
    0.04458, 0.032, 0.0232, 0.017, 0.01192, 0.00821, 0.005723, 0.004102, 0.002929, 0.002091, 0.001484, 0.001047,
    0.00074, 0.00052, 0.0003611, 0.0002492, 0.0001719, 0.00012, 8.48e-05, 6e-05, 4.24e-05, 3e-05, 2.12e-05, 1.499e-05,
];

/// ColorChecker patch names in chart reading order (row-major, 4 rows × 6 columns).
pub const MCC_NAMES: [&str; 24] = [
    "dark skin",
    "light skin",
    "blue sky",
    "foliage",
    "blue flower",
    "bluish green",
    "orange",
    "purplish blue",
    "moderate red",
    "purple",
    "yellow green",
    "orange yellow",
    "blue",
    "green",
    "red",
    "yellow",
    "magenta",
    "cyan",
    "white 9.5 (.05 D)",
    "neutral 8 (.23 D)",
    "neutral 6.5 (.44 D)",
    "neutral 5 (.70 D)",
    "neutral 3.5 (1.05 D)",
    "black 2 (1.5 D)",
];

/// Averaged ColorChecker reflectances (BabelColor), 400–700 nm in 10 nm steps.
pub const MCC_REFLECTANCE: [[f64; 31]; 24] = [
    [
        0.0610, 0.0620, 0.0620, 0.0620, 0.0620, 0.0620, 0.0620, 0.0620, 0.0620, 0.0630, 0.0650, 0.0700, 0.0760, 0.0790,
        0.0810, 0.0840, 0.0910, 0.1030, 0.1190, 0.1340, 0.1430, 0.1470, 0.1510, 0.1580, 0.1680, 0.1790, 0.1880, 0.1900,
        0.1860, 0.1810, 0.1820,
    ],
    [
        0.1750, 0.1910, 0.1960, 0.1990, 0.2040, 0.2130, 0.2280, 0.2510, 0.2800, 0.3090, 0.3290, 0.3330, 0.3150, 0.2860,
        0.2730, 0.2760, 0.2770, 0.2890, 0.3390, 0.4200, 0.4880, 0.5250, 0.5460, 0.5620, 0.5780, 0.5950, 0.6120, 0.6250,
        0.6380, 0.6560, 0.6780,
    ],
    [
        0.2510, 0.3060, 0.3240, 0.3300, 0.3330, 0.3310, 0.3230, 0.3110, 0.2980, 0.2850, 0.2690, 0.2500, 0.2310, 0.2140,
        0.1990, 0.1850, 0.1690, 0.1570, 0.1490, 0.1450, 0.1420, 0.1410, 0.1410, 0.1410, 0.1430, 0.1470, 0.1520, 0.1540,
        0.1500, 0.1440, 0.1360,
    ],
    [
        0.0560, 0.0570, 0.0580, 0.0590, 0.0600, 0.0610, 0.0620, 0.0630, 0.0650, 0.0670, 0.0750, 0.1010, 0.1450, 0.1780,
        0.1840, 0.1700, 0.1490, 0.1330, 0.1220, 0.1150, 0.1090, 0.1050, 0.1040, 0.1060, 0.1090, 0.1120, 0.1140, 0.1140,
        0.1120, 0.1120, 0.1150,
    ],
    [
        0.2940, 0.3750, 0.4080, 0.4210, 0.4260, 0.4260, 0.4190, 0.4030, 0.3790, 0.3460, 0.3110, 0.2810, 0.2540, 0.2290,
        0.2140, 0.2080, 0.2020, 0.1940, 0.1930, 0.2000, 0.2140, 0.2300, 0.2410, 0.2540, 0.2790, 0.3130, 0.3480, 0.3660,
        0.3660, 0.3590, 0.3580,
    ],
    [
        0.2470, 0.2970, 0.3200, 0.3370, 0.3550, 0.3810, 0.4190, 0.4660, 0.5100, 0.5460, 0.5670, 0.5740, 0.5690, 0.5510,
        0.5240, 0.4880, 0.4450, 0.4000, 0.3500, 0.2990, 0.2520, 0.2210, 0.2040, 0.1960, 0.1910, 0.1880, 0.1910, 0.1990,
        0.2120, 0.2230, 0.2320,
    ],
    [
        0.0530, 0.0540, 0.0540, 0.0550, 0.0550, 0.0550, 0.0560, 0.0570, 0.0580, 0.0610, 0.0680, 0.0890, 0.1250, 0.1540,
        0.1740, 0.1990, 0.2480, 0.3350, 0.4440, 0.5380, 0.5870, 0.5950, 0.5910, 0.5870, 0.5840, 0.5840, 0.5900, 0.6030,
        0.6200, 0.6390, 0.6550,
    ],
    [
        0.2290, 0.2860, 0.3270, 0.3610, 0.3880, 0.4000, 0.3920, 0.3620, 0.3160, 0.2600, 0.2090, 0.1680, 0.1380, 0.1170,
        0.1040, 0.0960, 0.0900, 0.0860, 0.0840, 0.0840, 0.0840, 0.0840, 0.0840, 0.0850, 0.0900, 0.0980, 0.1090, 0.1230,
        0.1430, 0.1690, 0.2050,
    ],
    [
        0.1310, 0.1350, 0.1330, 0.1320, 0.1300, 0.1280, 0.1250, 0.1200, 0.1150, 0.1100, 0.1050, 0.1000, 0.0950, 0.0930,
        0.0920, 0.0930, 0.0960, 0.1080, 0.1560, 0.2650, 0.3990, 0.5000, 0.5560, 0.5790, 0.5880, 0.5910, 0.5930, 0.5940,
        0.5980, 0.6020, 0.6070,
    ],
    [
        0.1460, 0.1690, 0.1780, 0.1730, 0.1580, 0.1390, 0.1190, 0.1010, 0.0870, 0.0750, 0.0660, 0.0600, 0.0560, 0.0530,
        0.0510, 0.0510, 0.0520, 0.0520, 0.0510, 0.0520, 0.0580, 0.0730, 0.0960, 0.1190, 0.1410, 0.1660, 0.1940, 0.2270,
        0.2650, 0.3090, 0.3550,
    ],
    [
        0.0620, 0.0630, 0.0640, 0.0660, 0.0690, 0.0750, 0.0850, 0.1050, 0.1390, 0.1920, 0.2710, 0.3760, 0.4760, 0.5310,
        0.5490, 0.5460, 0.5280, 0.5040, 0.4710, 0.4280, 0.3810, 0.3470, 0.3270, 0.3180, 0.3120, 0.3100, 0.3140, 0.3270,
        0.3450, 0.3630, 0.3760,
    ],
    [
        0.0630, 0.0640, 0.0640, 0.0640, 0.0650, 0.0660, 0.0670, 0.0680, 0.0710, 0.0760, 0.0870, 0.1250, 0.2060, 0.3050,
        0.3830, 0.4310, 0.4690, 0.5180, 0.5680, 0.6070, 0.6280, 0.6370, 0.6400, 0.6420, 0.6450, 0.6480, 0.6510, 0.6530,
        0.6570, 0.6640, 0.6730,
    ],
    [
        0.1020, 0.1460, 0.2000, 0.2440, 0.2820, 0.3090, 0.3080, 0.2780, 0.2310, 0.1780, 0.1300, 0.0940, 0.0700, 0.0540,
        0.0460, 0.0420, 0.0390, 0.0380, 0.0380, 0.0380, 0.0380, 0.0390, 0.0390, 0.0400, 0.0410, 0.0420, 0.0440, 0.0450,
        0.0460, 0.0460, 0.0480,
    ],
    [
        0.0540, 0.0550, 0.0570, 0.0590, 0.0610, 0.0660, 0.0750, 0.0930, 0.1250, 0.1780, 0.2460, 0.3070, 0.3370, 0.3340,
        0.3170, 0.2930, 0.2620, 0.2300, 0.1980, 0.1650, 0.1350, 0.1150, 0.1040, 0.0980, 0.0940, 0.0920, 0.0930, 0.0970,
        0.1020, 0.1080, 0.1130,
    ],
    [
        0.0480, 0.0470, 0.0470, 0.0470, 0.0470, 0.0470, 0.0460, 0.0450, 0.0440, 0.0440, 0.0450, 0.0460, 0.0470, 0.0480,
        0.0490, 0.0500, 0.0540, 0.0600, 0.0720, 0.1040, 0.1780, 0.3120, 0.4670, 0.5810, 0.6440, 0.6750, 0.6900, 0.6980,
        0.7060, 0.7150, 0.7240,
    ],
    [
        0.0520, 0.0520, 0.0530, 0.0540, 0.0560, 0.0590, 0.0670, 0.0810, 0.1070, 0.1520, 0.2250, 0.3360, 0.4620, 0.5590,
        0.6160, 0.6500, 0.6720, 0.6940, 0.7100, 0.7230, 0.7310, 0.7390, 0.7460, 0.7520, 0.7580, 0.7640, 0.7690, 0.7710,
        0.7760, 0.7820, 0.7900,
    ],
    [
        0.2830, 0.3460, 0.3620, 0.3540, 0.3340, 0.3060, 0.2760, 0.2480, 0.2180, 0.1900, 0.1680, 0.1490, 0.1270, 0.1070,
        0.1000, 0.1020, 0.1040, 0.1090, 0.1370, 0.2000, 0.2900, 0.4000, 0.5160, 0.6150, 0.6870, 0.7320, 0.7600, 0.7740,
        0.7830, 0.7930, 0.8030,
    ],
    [
        0.1920, 0.2360, 0.2610, 0.2860, 0.3170, 0.3530, 0.3900, 0.4260, 0.4460, 0.4440, 0.4230, 0.3850, 0.3370, 0.2830,
        0.2310, 0.1850, 0.1460, 0.1180, 0.1010, 0.0900, 0.0820, 0.0760, 0.0740, 0.0730, 0.0730, 0.0740, 0.0760, 0.0770,
        0.0760, 0.0750, 0.0730,
    ],
    [
        0.4230, 0.6600, 0.8110, 0.8620, 0.8770, 0.8840, 0.8910, 0.8960, 0.8990, 0.9040, 0.9070, 0.9090, 0.9110, 0.9100,
        0.9110, 0.9140, 0.9130, 0.9160, 0.9150, 0.9160, 0.9140, 0.9150, 0.9180, 0.9190, 0.9210, 0.9230, 0.9240, 0.9220,
        0.9220, 0.9250, 0.9270,
    ],
    [
        0.3650, 0.5070, 0.5670, 0.5830, 0.5880, 0.5900, 0.5910, 0.5900, 0.5880, 0.5880, 0.5890, 0.5890, 0.5910, 0.5900,
        0.5900, 0.5900, 0.5890, 0.5910, 0.5900, 0.5900, 0.5870, 0.5850, 0.5830, 0.5800, 0.5780, 0.5760, 0.5740, 0.5720,
        0.5710, 0.5690, 0.5680,
    ],
    [
        0.2720, 0.3310, 0.3500, 0.3570, 0.3610, 0.3630, 0.3630, 0.3610, 0.3590, 0.3580, 0.3580, 0.3590, 0.3600, 0.3600,
        0.3610, 0.3610, 0.3600, 0.3620, 0.3620, 0.3610, 0.3590, 0.3580, 0.3550, 0.3520, 0.3500, 0.3480, 0.3450, 0.3430,
        0.3400, 0.3380, 0.3350,
    ],
    [
        0.1630, 0.1800, 0.1860, 0.1900, 0.1930, 0.1940, 0.1940, 0.1920, 0.1910, 0.1910, 0.1910, 0.1920, 0.1920, 0.1920,
        0.1920, 0.1920, 0.1920, 0.1930, 0.1920, 0.1920, 0.1910, 0.1890, 0.1880, 0.1860, 0.1840, 0.1820, 0.1810, 0.1790,
        0.1780, 0.1760, 0.1740,
    ],
    [
        0.0840, 0.0870, 0.0890, 0.0900, 0.0920, 0.0920, 0.0910, 0.0900, 0.0900, 0.0900, 0.0900, 0.0900, 0.0900, 0.0900,
        0.0900, 0.0900, 0.0900, 0.0900, 0.0900, 0.0890, 0.0890, 0.0880, 0.0870, 0.0860, 0.0860, 0.0850, 0.0840, 0.0840,
        0.0830, 0.0830, 0.0820,
    ],
    [
        0.0320, 0.0330, 0.0330, 0.0330, 0.0330, 0.0330, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320,
        0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320, 0.0320,
        0.0320, 0.0320, 0.0320,
    ],
];
