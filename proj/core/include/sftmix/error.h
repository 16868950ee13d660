// Copyright 2026 The sftmix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFTMIX_ERROR_H_
#define SFTMIX_ERROR_H_

#include <stdexcept>
#include <string>

namespace sftmix {

// Coarse failure classes. The command-line tool maps each class to a fixed
// exit code so that schedulers can branch on it.
enum class ErrorClass {
  kValidation,  // exit 2
  kEvaluator,   // exit 3
  kLedger,      // exit 4
  kIo,          // exit 5
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass error_class, const std::string& what)
      : std::runtime_error(what), class_(error_class) {}

  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define SFTMIX_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorClass::Class, what) {} \
  }

SFTMIX_DEFINE_ERROR(ParseError, kValidation);
SFTMIX_DEFINE_ERROR(ValidationError, kValidation);
SFTMIX_DEFINE_ERROR(RuleError, kValidation);
SFTMIX_DEFINE_ERROR(FormatError, kValidation);
SFTMIX_DEFINE_ERROR(DuplicateDatasetError, kValidation);
SFTMIX_DEFINE_ERROR(UnknownDatasetError, kValidation);
SFTMIX_DEFINE_ERROR(MissingSplitError, kValidation);
SFTMIX_DEFINE_ERROR(SizeError, kValidation);
SFTMIX_DEFINE_ERROR(OversizeError, kValidation);
SFTMIX_DEFINE_ERROR(RangeError, kValidation);
SFTMIX_DEFINE_ERROR(MissingBenchmarkError, kValidation);
SFTMIX_DEFINE_ERROR(EmptyInputError, kValidation);
SFTMIX_DEFINE_ERROR(EvaluatorError, kEvaluator);
SFTMIX_DEFINE_ERROR(LedgerCorruptError, kLedger);
SFTMIX_DEFINE_ERROR(LedgerLockedError, kLedger);
SFTMIX_DEFINE_ERROR(IoError, kIo);

#undef SFTMIX_DEFINE_ERROR

// Evaluator failures that carry more detail than the base class.
class CommandFailed : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

class ScoreParseError : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

// Exit code for an error class, as documented in the README.
inline int ExitCodeFor(ErrorClass error_class) {
  switch (error_class) {
    case ErrorClass::kValidation:
      return 2;
    case ErrorClass::kEvaluator:
      return 3;
    case ErrorClass::kLedger:
      return 4;
    case ErrorClass::kIo:
      return 5;
  }
  return 1;
}

}  // namespace sftmix

#endif  // SFTMIX_ERROR_H_
