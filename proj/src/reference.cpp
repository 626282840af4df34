#include "kemeny/reference.hpp"

#include <algorithm>
#include <array>

namespace kemeny::reference {

namespace {

// Rows with blank entries in the source are omitted.
constexpr std::array<DistanceRow, 54> kDistance = {{
    {2, 0.000, 0.707, -1.875},     {3, 0.000, 1.610, -1.171},     {4, 0.000, 2.646, -0.747},
    {5, 0.000, 3.795, -0.548},     {6, 0.000, 5.046, -0.432},     {7, 0.000, 6.392, -0.356},
    {8, 0.000, 7.826, -0.302},     {9, 0.000, 9.345, -0.259},     {10, 0.006, 10.939, -0.230},
    {11, 0.009, 12.622, -0.212},   {12, -0.007, 14.352, -0.191},  {13, -0.017, 16.168, -0.173},
    {14, 0.006, 18.064, -0.161},   {15, -0.010, 19.996, -0.148},  {16, -0.025, 22.005, -0.141},
    {17, 0.001, 24.066, -0.131},   {18, 0.010, 26.216, -0.122},   {19, -0.021, 28.386, -0.117},
    {20, 0.025, 30.645, -0.105},   {21, 0.006, 32.942, -0.105},   {22, 0.008, 35.272, -0.096},
    {23, 0.031, 37.694, -0.096},   {24, -0.012, 40.155, -0.095},  {25, 0.002, 42.647, -0.091},
    {26, 0.019, 45.183, -0.083},   {27, -0.066, 50.477, -0.080},  {28, 0.040, 53.177, -0.076},
    {29, 0.040, 55.900, -0.075},   {30, 0.046, 58.674, -0.072},   {31, 0.011, 61.506, -0.069},
    {32, 0.043, 64.418, -0.066},   {33, 0.014, 67.287, -0.061},   {34, 0.082, 70.272, -0.062},
    {35, -0.016, 73.262, -0.065},  {36, -0.036, 73.262, -0.057},  {37, -0.005, 76.255, -0.063},
    {38, 0.010, 79.419, -0.060},   {40, -0.035, 85.764, -0.058},  {45, -0.052, 102.107, -0.052},
    {50, 0.035, 119.342, -0.043},  {55, 0.075, 137.645, -0.039},  {60, 0.057, 156.656, -0.036},
    {62, -0.100, 164.530, -0.039}, {64, -0.020, 172.447, -0.039}, {68, -0.032, 188.808, -0.030},
    {75, 0.042, 218.527, -0.026},  {80, -0.066, 240.736, -0.023}, {85, 0.0643, 263.268, -0.0274},
    {92, 0.144, 296.597, -0.023},  {96, 0.155, 315.766, -0.0276}, {100, -0.038, 335.703, -0.024},
    {105, 0.0280, 360.907, -0.022}, {125, 0.021, 468.456, -0.013}, {225, -0.056, 1127.979, -0.013},
}};

constexpr std::array<StatRow, 2> kZ15 = {{{"kendall", -1.39, 0.98}, {"kemeny", -1.23, 0.87}}};
constexpr std::array<StatRow, 2> kZ25 = {{{"kendall", -1.87, 0.94}, {"kemeny", -1.67, 0.85}}};
constexpr std::array<StatRow, 2> kZ100 = {{{"kendall", -3.84, 0.93}, {"kemeny", -3.50, 0.85}}};
constexpr std::array<StatRow, 2> kZ250 = {{{"kendall", -6.07, 0.90}, {"kemeny", -5.55, 0.83}}};
constexpr std::array<StatRow, 2> kZ1250 = {{{"kendall", -13.607, 0.972}, {"kemeny", -12.480, 0.894}}};
constexpr std::array<StatRow, 2> kZ2236 = {{{"kendall", -18.207, 0.961}, {"kemeny", -16.705, 0.885}}};

const std::array<SizedRows, 6> kTiedZ = {{
    {15, kZ15}, {25, kZ25}, {100, kZ100}, {250, kZ250}, {1250, kZ1250}, {2236, kZ2236},
}};

constexpr std::array<StatRow, 3> kS15 = {{{"spearman_sum_d2", 763.4964, 141.7768},
                                          {"kemeny_rho_s", -1.3597, 0.9473},
                                          {"pearson_t", -1.5640, 1.4725}}};
constexpr std::array<StatRow, 3> kS25 = {{{"spearman_sum_d2", 3560.7549, 489.2358},
                                          {"kemeny_rho_s", -1.8103, 0.9218},
                                          {"pearson_t", -1.9309, 1.3617}}};
constexpr std::array<StatRow, 3> kS100 = {{{"spearman_sum_d2", 228291.6195, 15637.7198},
                                           {"kemeny_rho_s", -3.6803, 0.9337},
                                           {"pearson_t", -3.6637, 1.3057}}};
constexpr std::array<StatRow, 3> kS250 = {{{"spearman_sum_d2", 3569285.90367, 151384.21862},
                                           {"kemeny_rho_s", -5.839, 0.9227},
                                           {"pearson_t", -5.7378, 1.2702}}};
constexpr std::array<StatRow, 3> kS1250 = {{{"spearman_sum_d2", 446109898.161, 8561320.458},
                                            {"kemeny_rho_s", -13.092, 0.929},
                                            {"pearson_t", -12.809, 1.270}}};
constexpr std::array<StatRow, 3> kS2236 = {{{"spearman_sum_d2", 2553875721.27, 36792618.22},
                                            {"kemeny_rho_s", -17.52, 0.93},
                                            {"pearson_t", -17.12, 1.27}}};

const std::array<SizedRows, 6> kSpearmanZ = {{
    {15, kS15}, {25, kS25}, {100, kS100}, {250, kS250}, {1250, kS1250}, {2236, kS2236},
}};

constexpr std::array<StatRow, 6> kC30 = {{{"pearson_r", -0.00262, 0.18525},
                                          {"spearman", -0.00281, 0.18562},
                                          {"kemeny_rho_s", -0.00281, 0.18562},
                                          {"kemeny_tau", -0.00200, 0.12805},
                                          {"kendall_b", -0.00207, 0.13245},
                                          {"arcsine_r", -0.00184, 0.12032}}};
constexpr std::array<StatRow, 6> kC150 = {{{"pearson_r", 0.00071, 0.08212},
                                           {"spearman", 0.00080, 0.08208},
                                           {"kemeny_rho_s", 0.00080, 0.08208},
                                           {"kemeny_tau", 0.00051, 0.05516},
                                           {"kendall_b", 0.00052, 0.05553},
                                           {"arcsine_r", 0.00051, 0.05244}}};
constexpr std::array<StatRow, 6> kC500 = {{{"pearson_r", 0.00012, 0.04484},
                                           {"spearman", 0.00015, 0.04487},
                                           {"kemeny_rho_s", 0.00015, 0.04487},
                                           {"kemeny_tau", 0.00009, 0.02999},
                                           {"kendall_b", 0.00009, 0.03005},
                                           {"arcsine_r", 0.00009, 0.02860}}};

const std::array<SizedRows, 3> kCorrelations = {{{30, kC30}, {150, kC150}, {500, kC500}}};

}  // namespace

std::span<const DistanceRow> distance_table() { return kDistance; }

std::optional<DistanceRow> distance_row(int n) {
  const auto it = std::find_if(kDistance.begin(), kDistance.end(), [n](const DistanceRow& r) { return r.n == n; });
  if (it == kDistance.end()) return std::nullopt;
  return *it;
}

std::span<const SizedRows> tied_z_table() { return kTiedZ; }
std::span<const SizedRows> spearman_z_table() { return kSpearmanZ; }
std::span<const SizedRows> correlation_table() { return kCorrelations; }

std::optional<StatRow> lookup(std::span<const SizedRows> table, int n, std::string_view estimator) {
  for (const auto& block : table) {
    if (block.n != n) continue;
    for (const auto& row : block.rows) {
      if (row.estimator == estimator) return row;
    }
  }
  return std::nullopt;
}

}  // namespace kemeny::reference
