enum FeatSet { Feat0, Feat1 };
extern const enum FeatSet MODE;
extern int g56;
int g67 = 0;

int c6helper() {
    return 6;
}
int c6recv() {
    if (g56 > 0) {
        return c6helper();
    }
    return 0;
}
int c6send(int k) {
    if (MODE == Feat1) {
        g67 += k;
    }
    return 0;
}
