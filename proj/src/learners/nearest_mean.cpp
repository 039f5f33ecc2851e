#include "common.hpp"

namespace granulex::learners {

namespace {

class NearestMeanModel final : public Model {
public:
    NearestMeanModel(Eigen::MatrixXd means, std::vector<int> present)
        : means_(std::move(means)), present_(std::move(present)) {}

    int dims() const override { return static_cast<int>(means_.cols()); }
    int classes() const override { return static_cast<int>(means_.rows()); }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        const Eigen::VectorXd dist = (means_.rowwise() - x.transpose()).rowwise().norm();
        return softmax_present(-dist, present_);
    }

    json state() const override { return {{"means", matrix_to_json(means_)}, {"present", present_}}; }

private:
    Eigen::MatrixXd means_;
    std::vector<int> present_;
};

}  // namespace

std::unique_ptr<Model> fit_nearest_mean(const LearnerSpec&, const Dataset& data) {
    return std::make_unique<NearestMeanModel>(class_means(data), present_classes(data));
}

std::unique_ptr<Model> restore_nearest_mean(const json& state) {
    return std::make_unique<NearestMeanModel>(matrix_from_json(state.at("means")),
                                              state.at("present").get<std::vector<int>>());
}

}  // namespace granulex::learners
