"""Counting lifts of tame residual data and comparing with the expected rings."""

from modcomp.tame import TameParams, enumerate_lifts, match_versal, tangent_dimension

rows = [(5, 11, 2), (7, 3, 3), (5, 2, 1), (5, 19, 1), (5, 2, 2)]
for p, q, alpha in rows:
    for ring in ("dual", "zp2", "zp3"):
        params = TameParams(p, q, alpha, ring)
        lifts = enumerate_lifts(params)
        rep = match_versal(params, lifts)
        extra = ""
        if ring == "dual":
            extra = "tangent dim %d" % tangent_dimension(params, lifts)
        print("p=%d q=%2d alpha=%d %-8s case %-12s lifts %5d match %-5s %s"
              % (p, q, alpha, rep.ring, rep.case, rep.lifts, rep.match, extra))
