#pragma once
#include <string>
#include <vector>

#include "etalab/operator_model.hpp"

namespace etalab {

// "comp=2,m=1.0,c=0.3,theta=0.25,v=0.2cos1,0.1sin2" -> ModelOperator.
// v terms are "<amp>cos<freq>" / "<amp>sin<freq>", comma- or '+'-separated;
// a comma token without '=' continues the v list.
ModelOperator parse_operator(const std::string& spec);

// "n=8" or "line".
CoverSpec parse_cover(const std::string& spec);

// "2,4,8" or "2..16" (inclusive range).  Nonempty, each entry >= lo.
std::vector<int> parse_cover_list(const std::string& spec);

}  // namespace etalab
