#pragma once

#include <iosfwd>
#include <memory>

#include "nfv/deploy.hpp"

namespace nfv {

/// Options of the deployment procedure that reproduce the best-fit baseline:
/// one instance per VNF, cheapest VMs only, no backtracking and no delay compensation.
DeployOptions bestfit_options();

/// Online baseline: each request is placed once, at arrival, and keeps its
/// resources until departure.
RunResult run_bestfit(std::shared_ptr<const Problem> problem, std::ostream* log = nullptr);

}  // namespace nfv
