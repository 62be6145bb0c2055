# QMARGIN v1.0
