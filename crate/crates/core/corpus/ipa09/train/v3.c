int main() {
    int t, hh, mm, ss;
    scanf("%d", &t);
    hh = t / 3600;
    t = t - hh * 3600;
    mm = t / 60;
    ss = t - mm * 60;
    if (hh < 10) {
        printf("0");
    }
    printf("%d:", hh);
    if (mm < 10) {
        printf("0");
    }
    printf("%d:", mm);
    if (ss < 10) {
        printf("0");
    }
    printf("%d\n", ss);
    return 0;
}
