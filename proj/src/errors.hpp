#ifndef CONTAGION_ERRORS_HPP
#define CONTAGION_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace contagion {

enum class errc {
    invalid_argument,
    parse,
    validation,
    numeric,
    not_found,
    io,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

// Integration failures carry the time at which the step size collapsed.
class integration_error : public error {
public:
    integration_error(double t_fail, const std::string& msg)
        : error(errc::numeric, msg), t_fail_(t_fail) {}

    double failure_time() const noexcept { return t_fail_; }

private:
    double t_fail_;
};

} // namespace contagion

#endif
