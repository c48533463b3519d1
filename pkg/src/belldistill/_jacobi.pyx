# cython: language_level=3
"""Cyclic Jacobi diagonalization of a complex Hermitian matrix, in place."""

from libc.math cimport sqrt, hypot

cimport cython


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


@cython.boundscheck(False)
@cython.wraparound(False)
cdef double _offdiag_norm(double complex[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc += _abs2(a[i, j])
    return sqrt(2.0 * acc)


@cython.boundscheck(False)
@cython.wraparound(False)
cdef int _sweeps(double complex[:, ::1] a, double complex[:, ::1] vt,
                 double tol, int max_sweeps, bint want_vectors) noexcept nogil:
    # Rows of ``a`` are read contiguously and the Hermitian mirror is written
    # back into the columns; ``vt`` holds the eigenvectors as rows.
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double negligible = tol * 1e-6
    cdef double mag, theta, t, c, s, app, aqq, er, ei
    cdef double xr, xi, yr, yi, ur, ui, wr, wi
    for sweep in range(max_sweeps + 1):
        if _offdiag_norm(a) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = hypot(a[p, q].real, a[p, q].imag)
                if mag <= negligible:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                er = a[p, q].real / mag
                ei = a[p, q].imag / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + hypot(theta, 1.0))
                else:
                    t = -1.0 / (-theta + hypot(theta, 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                # row p <- c*row_p - s*e*row_q ; row q <- s*conj(e)*row_p + c*row_q
                for k in range(n):
                    if k == p or k == q:
                        continue
                    xr = a[p, k].real
                    xi = a[p, k].imag
                    yr = a[q, k].real
                    yi = a[q, k].imag
                    ur = c * xr - s * (er * yr - ei * yi)
                    ui = c * xi - s * (er * yi + ei * yr)
                    wr = s * (er * xr + ei * xi) + c * yr
                    wi = s * (er * xi - ei * xr) + c * yi
                    a[p, k].real = ur
                    a[p, k].imag = ui
                    a[q, k].real = wr
                    a[q, k].imag = wi
                    a[k, p].real = ur
                    a[k, p].imag = -ui
                    a[k, q].real = wr
                    a[k, q].imag = -wi
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    # columns v_p, v_q of V are rows p, q of vt:
                    # v_p <- c*v_p - s*conj(e)*v_q ; v_q <- s*e*v_p + c*v_q
                    for k in range(n):
                        xr = vt[p, k].real
                        xi = vt[p, k].imag
                        yr = vt[q, k].real
                        yi = vt[q, k].imag
                        vt[p, k].real = c * xr - s * (er * yr + ei * yi)
                        vt[p, k].imag = c * xi - s * (er * yi - ei * yr)
                        vt[q, k].real = s * (er * xr - ei * xi) + c * yr
                        vt[q, k].imag = s * (er * xi + ei * xr) + c * yi
    return -1


def jacobi_hermitian(double complex[:, ::1] a, double complex[:, ::1] vt,
                     double tol, int max_sweeps, bint want_vectors):
    """Run row-cyclic Jacobi sweeps until the off-diagonal norm is <= tol.

    ``a`` is overwritten; on return its diagonal holds the eigenvalues.
    When ``want_vectors`` is set, ``vt`` (the identity on entry) accumulates
    the *transposed* eigenvector matrix: eigenvector ``i`` is row ``i``.
    Returns the number of sweeps performed, or -1 if ``max_sweeps`` was
    exhausted. The GIL is released for the whole iteration.
    """
    cdef int sweeps
    with nogil:
        sweeps = _sweeps(a, vt, tol, max_sweeps, want_vectors)
    return sweeps
