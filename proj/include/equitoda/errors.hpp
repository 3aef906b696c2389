/*
   Copyright 2026 The equitoda Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef EQUITODA_ERRORS_HPP
#define EQUITODA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace equitoda {

/// Base class of every error raised by the engine.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// eps_div on a value whose epsilon^0 part is nonzero.
struct NonDivisible : Error {
    using Error::Error;
};

/// A coefficient was requested outside an operator's validity window.
struct WindowUnderflow : Error {
    using Error::Error;
};

/// An evolutionary derivation has no image for a generator it was applied to.
struct MissingImage : Error {
    using Error::Error;
};

/// A reduction table has no entry for a coefficient a_k.
struct MissingCoefficient : Error {
    using Error::Error;
};

/// Inverse of the zero bracket [0].
struct ZeroBracket : Error {
    using Error::Error;
};

/// An operation that requires a polynomial received a q-localized value.
struct Localized : Error {
    using Error::Error;
};

/// Malformed serialized input.
struct ParseError : Error {
    using Error::Error;
};

/// Invalid run configuration; the message names the minimal adequate setting.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace equitoda

#endif // EQUITODA_ERRORS_HPP
