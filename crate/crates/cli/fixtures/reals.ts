# the half line [0, inf)
window 0 1
interval 0 1
tail continuous
