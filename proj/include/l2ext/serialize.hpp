#pragma once

#include <string>
#include <vector>

#include "l2ext/bergman.hpp"
#include "l2ext/certify.hpp"
#include "l2ext/constants.hpp"
#include "l2ext/denominator.hpp"

namespace l2ext {

/// Shortest decimal that round-trips; "inf", "-inf" or "nan" otherwise.
std::string format_double(double v);

/// {delta, C, K, witness_x, bound, ode_max_residual, h_conditions, berg}; infinite
/// values become null, and berg is null when no check was run.
std::string certificate_json(const DeltaCertificate& cert, int indent = 2);
std::string class_result_json(const std::string& spec_id, const ClassDResult& res, int indent = 2);
std::string certificates_csv(const std::vector<DeltaCertificate>& certs);

/// delta,x,G,h,hp,hpp
std::string twist_csv(const std::vector<TwistSamples>& tables);
std::string twist_json(const std::vector<TwistSamples>& tables, int indent = 2);

std::string extension_bounds_csv(const std::vector<ExtensionBound>& bounds);
std::string extension_bounds_json(const std::vector<ExtensionBound>& bounds, int indent = 2);

/// family,s,N,delta,K_numeric,K_bound,C,generic_bound,as_printed_bound,discrepancy
std::string report_csv(const Report& report);
std::string report_json(const Report& report, int indent = 2);

/// domain,spec,weight,f,delta,ratio,bound,margin,degree,quad_error,flag
std::string verdicts_csv(const std::vector<ModelVerdict>& verdicts);
std::string verdicts_json(const std::vector<ModelVerdict>& verdicts, int indent = 2);

}  // namespace l2ext
