#pragma once

namespace zeeman {

/// Selects between the OpenMP kernel and the plain serial reference loop.
enum class Execution { serial, parallel };

int available_threads();

}  // namespace zeeman
