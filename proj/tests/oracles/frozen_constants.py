# Copyright 2026 The gatecap developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference values frozen into the C++ tests.

Run `python3 tests/oracles/frozen_constants.py` and compare against the
literals in tests/*.cpp; every numeric literal tagged with this file's name
must match the printed value to the shown precision.
"""

import mpmath as mp

mp.mp.dps = 30


def log2(x):
    return mp.log(x) / mp.log(2)


def eta(t):
    if t == 0:
        return mp.mpf(0)
    return -t * log2(t)


def fannes(t, dim):
    # Entropy-difference bound T log2(D) + eta(T) for trace distance
    # T <= 1/e in dimension D, with eta(x) = -x log2(x).
    return t * log2(dim) + eta(t)


def holevo_two_pure():
    # chi of {1/2 |0>, 1/2 |+>}: member entropies vanish, so chi = S(avg).
    avg = mp.matrix([[mp.mpf(3) / 4, mp.mpf(1) / 4], [mp.mpf(1) / 4, mp.mpf(1) / 4]])
    # Eigenvalues of [[3/4,1/4],[1/4,1/4]]: 1/2 +- sqrt(2)/4.
    lam1 = mp.mpf(1) / 2 + mp.sqrt(2) / 4
    lam2 = mp.mpf(1) / 2 - mp.sqrt(2) / 4
    assert mp.almosteq(lam1 + lam2, avg[0, 0] + avg[1, 1])
    return -lam1 * log2(lam1) - lam2 * log2(lam2), lam1, lam2


def main():
    print("fannes(0.2, 4)                =", mp.nstr(fannes(mp.mpf("0.2"), 4), 17))
    print("fannes(1/e, 2)                =", mp.nstr(fannes(1 / mp.e, 2), 17))
    chi, lam1, lam2 = holevo_two_pure()
    print("holevo {1/2|0>,1/2|+>}        =", mp.nstr(chi, 17))
    print("  avg eigenvalue high         =", mp.nstr(lam1, 17))
    print("  avg eigenvalue low          =", mp.nstr(lam2, 17))
    # Trace distance without the 1/2 factor: 2 sqrt(1 - |<0|+>|^2).
    print("trace_distance(|0>, |+>)      =", mp.nstr(2 * mp.sqrt(1 - mp.mpf(1) / 2), 17))
    print("rate-boost threshold (2,2,1,1)=", mp.nstr((mp.mpf(1) / 16) ** 4, 17))
    print("absolute threshold (1/2e)^2   =", mp.nstr((1 / (2 * mp.e)) ** 2, 17))
    print("superposition penalty log2(e)/e =", mp.nstr(log2(mp.e) / mp.e, 17))
    print("chained fidelity M=10 eps=1e-6 =", mp.nstr(1 - 4 * 10 * mp.sqrt(mp.mpf("1e-6")), 17))
    print("ancilla rate n=2 d=4 tau=1    =", mp.nstr((2 * 2 + log2(4)) / 1, 17))


if __name__ == "__main__":
    main()
