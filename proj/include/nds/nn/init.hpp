#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nds/nn/model.hpp"

namespace nds::nn {

// Weights ~ N(0, 2 / fan_in) (FC: in; SC: unmasked entries of the row;
// CONV: filter_size * in_channels), biases 0, BN scale 1 and shift 0,
// population statistics mean 0 / var 1. Each parameter draws from a stream
// keyed by (seed, parameter name).
template <typename T>
void init_params(Model<T>& model, std::uint64_t seed);

// Same rule restricted to the named layers.
template <typename T>
void init_layers(Model<T>& model, const std::vector<std::string>& layer_names, std::uint64_t seed);

}  // namespace nds::nn
