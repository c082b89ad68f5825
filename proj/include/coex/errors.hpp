#ifndef COEX_ERRORS_HPP
#define COEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coex
{
    // Shape or index contract violated by the caller
    class DimensionError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Factorization failed or produced non-finite output
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Projection subspace has dimension zero (M_R <= rows of the composite channel)
    class EmptyNullSpace : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Gram matrix of the channel is singular, channel inversion impossible
    class ZfInfeasible : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Every cluster has an empty null space
    class NoFeasibleCluster : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Configuration problem tied to one key
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(std::string key, const std::string &what)
            : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
        {
        }
        const std::string &key() const noexcept { return key_; }

    private:
        std::string key_;
    };

} // namespace coex

#endif // COEX_ERRORS_HPP
