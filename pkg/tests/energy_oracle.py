"""Straight-line transcription of the published protocol energy equations.

Deliberately independent of ``eeibma.energy``: plain floats, no shared
helpers, one expression per equation.  Used as the refactoring guard.
"""


def tdma(Pt, Pr, Pi, Tc, Td, N, m, n, l):
    E_cap = Pt * Tc + (N - 1) * Pr * Tc
    E_cfp = n * Pt * Td + m * Pt * Td + (N - m - n - 1) * Pi * Td
    return E_cap + l * E_cfp


def eatdma(Pt, Pr, Pi, Pe, Tc, Td, Te, N, m, n, l):
    E_cap = Pt * Tc + (N - 1) * Pr * Tc
    E_cfp = n * Pt * Td + (N - m - n - 1) * (Pi * Td + Pe * Te) + m * Pt * Td
    return E_cap + l * E_cfp


def bma(Pt, Pr, Pi, Tc, Td, Tch, N, m, n_w, l):
    E_cap = (m + n_w) * Pr * Tc + (N - m - n_w - 1) * Pi * Tc + Pt * Tch
    E_cfp = (n_w + m) * Pr * Td + n_w * Pt * Td
    return (E_cap + E_cfp) * l


def eei(Pt, Pr, Pi, Tc, Td, Tch, N, m, n_p, l):
    E_cap = (m + n_p) * Pr * Tc + (N - m - n_p - 1) * Pi * Tc + Pt * Tch
    E_cfp = n_p * Pr * Td + m * Pr * Td + n_p * Pt * Td
    return l * (E_cap + E_cfp)


def expected_active(N, m, p):
    return (N - m - 1) * p
