#pragma once

#include "eqfvio/lie/gauge.hpp"
#include "eqfvio/lie/se23.hpp"
#include "eqfvio/lie/se3.hpp"
#include "eqfvio/lie/so3.hpp"
#include "eqfvio/lie/sot3.hpp"
