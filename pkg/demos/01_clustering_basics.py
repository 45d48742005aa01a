#!/usr/bin/env python3
# Cluster two Gaussian blobs without any supervision.
#
# The solver builds a sparse local-scaling similarity matrix, takes the top
# eigenvectors of the clustering objective, and reads cluster labels straight
# off the (sign-fixed, clipped, normalized) eigenvectors.  No k-means step,
# no random restarts: the whole solution is one eigendecomposition.
import numpy as np

from smiclust import adjusted_rand_index, cluster, make_blobs

ds = make_blobs(n_per_class=100, c=2, d=2, separation=6.0, seed=0)
print(f"dataset: {ds.n} points in {ds.d}-d, {ds.c} classes")

labels, model = cluster(ds, cs=None, t=5, gamma=0.0, eta=0.0, c=2)

print("ARI vs ground truth:", adjusted_rand_index(labels, ds.labels))
print("cluster sizes:", np.bincount(labels)[1:])
print("leading eigenvalues:", np.round(model.lam, 2))

# The labels are invariant to the overall scale of the objective, and with
# no links the strength parameters have no effect at all:
labels_scaled, _ = cluster(ds, cs=None, t=5, gamma=2.0, eta=0.0, c=2)
print("gamma changes nothing without links:", np.array_equal(labels, labels_scaled))
