#pragma once

// Frozen reference values from tools/oracles.py (numpy/scipy assembly and
// eigensolvers, independent of the library). Regenerate with that script.

namespace vvlab::oracle {

// circle, n = 256, b = 0, a = 2 + cos x
inline constexpr double kCircleWellEps[] = {0.2, 0.1, 0.05, 0.02, 0.01};
inline constexpr double kCircleWellLambda[] = {1.30313465660014, 1.21714818187621, 1.15490551315377,
                                               1.09871571139547, 1.07006172672776};
// mass of u^2 within |x - pi| <= 0.5
inline constexpr double kCircleWellMass[] = {0.612136991579437, 0.700606594121427, 0.786051269646554,
                                             0.884103462697407, 0.939269177371145};

// circle, n = 64, b = -sin x, c = 1 + 0.75 cos x
inline constexpr double kSinePressureEps[] = {0.2, 0.1, 0.05, 0.02, 0.01};
inline constexpr double kSinePressureLambda64[] = {0.323020295333803, 0.287017049401409, 0.268629705970639,
                                                   0.257480215365661, 0.25374465455994};

// torus, n = 128, b = (sin x, sin y), c = 1 + (cos x + cos y)/4, phi = -(cos x + cos y)
inline constexpr double kTorusMorseEps[] = {0.2, 0.1, 0.05, 0.02};
inline constexpr double kTorusMorseLambda[] = {1.44430120187538, 1.47390754228802, 1.48724577368068,
                                               1.49496011573317};
// exp(-phi/eps) u^2 mass in the four delta = 0.4 balls
inline constexpr double kTorusMorseBallTotal[] = {0.298717559544533, 0.534372944701934, 0.792758809510245,
                                                  0.981608886191627};

}  // namespace vvlab::oracle
