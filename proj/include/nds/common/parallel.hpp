#pragma once

namespace nds {

// Selects between the serial reference kernels and their OpenMP counterparts.
enum class Exec { serial, parallel };

// Caps the OpenMP worker count; values <= 0 leave the runtime default.
void set_num_threads(int n);
int max_threads();

}  // namespace nds
