#pragma once

#include "suprep/rational.hpp"
#include "suprep/exact_lp.hpp"
#include "suprep/double_description.hpp"
#include "suprep/vertex_enum.hpp"
#include "suprep/cone.hpp"
#include "suprep/farkas.hpp"
#include "suprep/market.hpp"
#include "suprep/conjugate.hpp"
#include "suprep/measures.hpp"
#include "suprep/pricing.hpp"
