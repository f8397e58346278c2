"""Constants of the Gaussian lower bound and the gap function around them."""
import numpy as np

from rqubo.analysis import PUBLISHED_GAUSSIAN_BOUND, bound_gap, entropy, gaussian_bound_constants


def main():
    m, a = gaussian_bound_constants()
    print(f"m* = {m:.9f}  alpha* = {a:.6f}")
    print(f"root residual = {abs(entropy(a) - m * m / (2 * a * a * (1 - a) ** 2)):.2e}")
    print(f"reported elsewhere: m = {PUBLISHED_GAUSSIAN_BOUND[0]}, alpha = {PUBLISHED_GAUSSIAN_BOUND[1]}")
    print("\nalpha, gap(alpha, m*)")
    for x in np.linspace(0.05, 0.95, 19):
        print(f"{x:.2f}, {bound_gap(x, m):+.5f}")


if __name__ == "__main__":
    main()
