#include "weldgeom/dataset.hpp"

namespace weldgeom {
namespace {

// Rows in (T, I, V, S, W, P, TH, L) order.
constexpr double kTrainingRows[][8] = {
    {10, 310, 28, 9.25, 4.7, 1.8, 4.2, 4.9},
    {3, 175, 25, 7, 5, 1, 4, 4.4},
    {6, 175, 18, 5, 5.6, 1.2, 4.6, 4.3},
    {4, 125, 30, 4, 4.1, 1.6, 5, 4.5},
    {6, 275, 30, 8, 5, 1.8, 4.8, 5},
    {8, 200, 34, 5, 4.4, 2.1, 4.7, 5.2},
    {3, 250, 28, 8, 5.3, 1.5, 4.6, 4.7},
    {4, 165, 27, 5.25, 4.8, 1.5, 4.7, 4.5},
    {8, 250, 32, 6.75, 4.9, 1.9, 4.5, 5},
    {3, 220, 30, 4, 5.2, 1.8, 5.4, 5.2},
    {3, 230, 30, 8, 5.2, 1.6, 4.6, 4.6},
    {5, 300, 22, 6, 7, 2, 5.2, 5.4},
    {3, 225, 30, 8, 5.2, 1.5, 4.5, 4.6},
    {8, 200, 26, 6, 5.1, 1.5, 4.2, 4.7},
    {4, 270, 20, 4, 7, 1.8, 5.8, 5.2},
    {8, 275, 22, 9, 4.8, 1.3, 3.8, 5},
    {6, 220, 24, 9.25, 4.5, 1.1, 3.5, 4.5},
    {8, 190, 32, 8, 5.2, 1.5, 4, 4.2},
    {5, 190, 30, 7, 5, 1.5, 4.2, 4.5},
    {5, 150, 20, 5.5, 4.8, 1, 4, 4.2},
    {10, 175, 32, 3.25, 4, 2.2, 5, 5.3},
    {10, 225, 26, 4, 5.7, 2, 4.9, 5.2},
    {4, 200, 34, 6, 4.8, 1.8, 4.8, 4.9},
    {5, 175, 36, 6, 4.7, 1.9, 4.8, 4.7},
    {5, 200, 34, 5, 4.5, 2.1, 5, 5.2},
    {5, 310, 28, 9.25, 4.9, 1.8, 5, 4.8},
    {8, 175, 32, 5, 4.6, 1.9, 4.6, 4.9},
    {4, 175, 28, 5, 4.9, 1.6, 4.8, 4.6},
    {5, 230, 26, 6, 5.5, 1.8, 4.7, 5},
    {10, 250, 32, 6.75, 4.8, 2, 4.3, 5},
    {6, 280, 25, 8, 5.4, 1.7, 4.5, 5},
    {6, 175, 32, 5, 4.6, 1.9, 4.6, 4.9},
    {5, 310, 34, 9.25, 4.7, 1.9, 5.6, 4.5},
    {8, 310, 28, 9.25, 4.7, 1.8, 4.6, 4.9},
    {3, 150, 26, 5, 4.7, 1.3, 4.8, 4.3},
    {4, 220, 22, 5, 6.2, 1.7, 5.2, 4.8},
    {3, 200, 32, 7, 5.2, 1.6, 4.7, 4.5},
    {8, 175, 36, 6, 4.6, 2, 4.6, 4.7},
    {6, 310, 34, 9.25, 4.6, 2, 5.4, 4.6},
    {6, 310, 28, 9.25, 4.8, 1.9, 4.7, 4.9},
    {5, 275, 30, 8, 5.2, 1.9, 4.9, 4.9},
    {8, 280, 35, 5, 4.4, 2.2, 4.7, 5.8},
    {3, 250, 20, 8, 5.5, 1.1, 4.1, 5},
    {4, 150, 32, 7, 5, 1.4, 4.2, 4.2},
    {4, 141, 30, 8, 5.2, 1, 3.7, 4},
    {10, 300, 20, 7, 6.4, 1.8, 4.1, 5},
    {4, 180, 30, 6, 5, 1.6, 4.6, 4.6},
    {3, 180, 25, 6, 5.1, 1.3, 4.5, 4.5},
    {6, 150, 22, 6, 4.6, 1, 3.8, 4.3},
    {4, 150, 26, 5, 4.7, 1.4, 4.7, 4.4},
    {5, 200, 26, 6, 5.2, 1.4, 4.5, 4.6},
    {8, 160, 25, 6, 4.7, 1.2, 4, 4.4},
    {6, 200, 26, 6, 5.2, 1.5, 4.4, 4.7},
};

constexpr double kTestRows[][8] = {
    {10, 280, 28, 6, 5.5, 2.2, 4.5, 5.2},
    {10, 200, 34, 5, 4.3, 2.1, 4.5, 5.2},
    {3, 125, 30, 4, 4.2, 1.6, 5.2, 4.5},
    {6, 300, 30, 7, 5.2, 2.1, 5, 5.3},
    {3, 275, 26, 9.25, 5, 1.4, 4.5, 4.8},
    {6, 250, 32, 6.75, 5, 2, 4.7, 5},
    {4, 310, 28, 9.25, 4.9, 1.7, 5.2, 4.8},
    {4, 250, 24, 6.75, 5.78, 1.7, 4.7, 5},
    {5, 250, 32, 6.75, 5, 2, 4.8, 5},
    {10, 310, 34, 9.25, 4.4, 2, 4.8, 4.6},
};

template <std::size_t N>
std::vector<WeldRecord> to_records(const double (&rows)[N][8]) {
  std::vector<WeldRecord> out;
  out.reserve(N);
  for (const auto& r : rows) {
    out.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7]});
  }
  return out;
}

}  // namespace

const std::vector<WeldRecord>& canonical_training_records() {
  static const std::vector<WeldRecord> records = to_records(kTrainingRows);
  return records;
}

const std::vector<WeldRecord>& canonical_test_records() {
  static const std::vector<WeldRecord> records = to_records(kTestRows);
  return records;
}

}  // namespace weldgeom
