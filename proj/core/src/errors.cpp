#include "delayrc/errors.hpp"

namespace delayrc {

InstabilityError::InstabilityError(const std::string& what, double blowup_time)
    : Error(what), blowup_time_(blowup_time) {}

}  // namespace delayrc
