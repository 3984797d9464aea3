#pragma once

#include "levyou/numerics.hpp"
#include "levyou/random.hpp"
#include "levyou/parallel.hpp"
#include "levyou/levy_measure.hpp"
#include "levyou/model.hpp"
#include "levyou/criteria.hpp"
#include "levyou/stable.hpp"
#include "levyou/ou1d.hpp"
#include "levyou/cylindrical.hpp"
#include "levyou/heat_example.hpp"
