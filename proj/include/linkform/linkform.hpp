// Umbrella header.
#pragma once

#include "cyclotomic.hpp"
#include "forms.hpp"
#include "groupring.hpp"
#include "json_io.hpp"
#include "knots.hpp"
#include "laurent.hpp"
#include "numeric.hpp"
#include "plinalg.hpp"
#include "signatures.hpp"
