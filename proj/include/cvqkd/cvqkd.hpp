#pragma once

#include "cvqkd/mathcore.hpp"
#include "cvqkd/gaussian.hpp"
#include "cvqkd/unitaries.hpp"
#include "cvqkd/blochmessiah.hpp"
#include "cvqkd/eca.hpp"
#include "cvqkd/oracle.hpp"
#include "cvqkd/bounds.hpp"
#include "cvqkd/scan.hpp"
