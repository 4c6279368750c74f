#pragma once

#include "foldcont/errors.hpp"
#include "foldcont/linalg/band_matrix.hpp"
#include "foldcont/linalg/eigen.hpp"
#include "foldcont/linalg/matrix.hpp"
#include "foldcont/linalg/square_matrix.hpp"
#include "foldcont/linalg/vector.hpp"
