// SPDX-License-Identifier: Apache-2.0

#ifndef SWEEPLOC_ERRORS_HPP
#define SWEEPLOC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sweeploc {

/// Thrown when an observation carries no detected beams and therefore no
/// position information at all.
class UnlocalizableError : public std::runtime_error {
public:
    explicit UnlocalizableError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace sweeploc

#endif // SWEEPLOC_ERRORS_HPP
