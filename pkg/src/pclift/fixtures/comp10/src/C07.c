extern bool FD;
extern int g67;
int g78 = 0;

int c7helper() {
    return 7;
}
int c7recv() {
    if (g67 > 0) {
        return c7helper();
    }
    return 0;
}
int c7send(int k) {
    while (FD) {
        g78 += k;
    }
    return 0;
}
