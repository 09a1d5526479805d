#pragma once

#include <vector>

namespace nds::dynamics {

struct ResponseSeries {
  std::vector<double> displacement;  // m
  std::vector<double> acceleration;  // m/s^2
};

}  // namespace nds::dynamics
