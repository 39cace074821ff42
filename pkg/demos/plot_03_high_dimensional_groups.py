"""
Groups with more variables than samples
=======================================

With 100 variables per group and 200 samples the regression of one group on
another is singular. Two remedies are available: ridge regression with a
cross-validated penalty, and pooling scores over random small subsets of
each group.
"""

from grouporder import GenConfig, OrderingError, OrderingOptions, estimate_order, generate_model, sample_data
from grouporder.bench import pairwise_order_error

model = generate_model(GenConfig((100, 100, 100), sparsity=0.05, seed=11))
data, truth = sample_data(model, 200, seed=0)

try:
    estimate_order(data, OrderingOptions(method="gdl-nlcorr"))
except OrderingError as exc:
    print("plain OLS:", exc)

###############################################################################
# Ridge keeps every regression well defined. The penalty is picked by
# 10-fold cross-validation of a shrunk Gaussian likelihood. Defined is not
# the same as accurate: with 200 samples for 100-dimensional groups the
# independence tests on ridge residuals are weak.

ridge = estimate_order(data, OrderingOptions(method="gdl-nlcorr", cv_lambda=True))
print("ridge order:", ridge.order.order, "error", pairwise_order_error(ridge.order, truth))

###############################################################################
# Scoring ten random subsets of ten variables per group and summing the
# scores avoids the singular full-dimensional tests. Residuals are still
# taken on the full groups.

opts = OrderingOptions(method="gdl-nlcorr", subgroup_size=10, n_subsets=10, seed=1)
pooled = estimate_order(data, opts)
print("10 subsets:", pooled.order.order, "error", pairwise_order_error(pooled.order, truth))
print("truth:     ", truth.order)
