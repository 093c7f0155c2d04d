#pragma once

#include <string>

#include "json.hpp"

#include "markovgap/markov_opt.hpp"
#include "markovgap/repro.hpp"

namespace markovgap {

using nlohmann::json;

// Scientific notation with 17 significant digits.
std::string format_number(double x);

// Dumps with every floating-point number in format_number form, so equal
// values always produce byte-identical text.
std::string dump_json(const json& j, int indent = 2);

// Complex matrices are nested arrays of [re, im] pairs, row by row.
json operator_to_json(const Operator& m);
Operator operator_from_json(const json& j);

json markov_spec_to_json(const MarkovSpec& spec);
MarkovSpec markov_spec_from_json(const json& j);

json report_to_json(const OptimizationReport& report);
json suite_report_to_json(const SuiteReport& report);
json witness_to_json(const NaiveRenyiWitness& w);
NaiveRenyiWitness witness_from_json(const json& j);

}  // namespace markovgap
