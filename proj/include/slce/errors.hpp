#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slce {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, out-of-range parameters, shape mismatches.
class DataError : public Error {
public:
    using Error::Error;
};

/// The numerics could not deliver (solver failure, singular scatter matrix).
class NumericalError : public Error {
public:
    using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
inline WarningHandler& warning_handler()
{
    thread_local WarningHandler handler = [](std::string_view msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}
} // namespace detail

/// Installs a per-thread sink for non-fatal diagnostics and returns the
/// previous one. Passing an empty handler silences warnings.
inline WarningHandler set_warning_handler(WarningHandler handler)
{
    WarningHandler previous = std::move(detail::warning_handler());
    detail::warning_handler() = std::move(handler);
    return previous;
}

inline void warn(const std::string& message)
{
    if (auto& h = detail::warning_handler()) h(message);
}

/// RAII capture of warnings, mostly for tests.
class WarningCapture {
public:
    WarningCapture()
        : previous_(set_warning_handler([this](std::string_view m) { messages_.emplace_back(m); }))
    {}
    ~WarningCapture() { set_warning_handler(std::move(previous_)); }
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }
    bool contains(std::string_view needle) const
    {
        for (const auto& m : messages_)
            if (m.find(needle) != std::string::npos) return true;
        return false;
    }

private:
    std::vector<std::string> messages_;
    WarningHandler previous_;
};

} // namespace slce
