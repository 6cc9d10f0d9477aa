#include "escrowscan/ensemble.hpp"

namespace escrowscan {

Label majority_vote(const std::vector<Label>& votes) {
    int fake = 0, real = 0;
    for (Label v : votes) {
        if (v == Label::Real)
            ++real;
        else
            ++fake; // Fake votes plus abstentions (documented rule)
    }
    return real > fake ? Label::Real : Label::Fake;
}

Label score_mean_vote(const std::vector<double>& scores) {
    double sum = 0;
    for (double s : scores) sum += s;
    return sum >= 0 ? Label::Fake : Label::Real;
}

} // namespace escrowscan
